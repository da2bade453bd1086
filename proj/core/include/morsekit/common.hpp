#pragma once

#include <stdexcept>
#include <string>

namespace morsekit {

enum class SegmentRegularity { theta_regular, taumod_regular_only, irregular };

enum class Longitudinality { longitudinal, anti_longitudinal, non_longitudinal, mixed };

struct DegenerateSegment : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IrregularSegment : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TypeNotInteriorToFace : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotStraightError : std::runtime_error {
  int vertex_index;
  NotStraightError(const std::string& what, int idx) : std::runtime_error(what), vertex_index(idx) {}
};
struct NotLongitudinal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace morsekit
