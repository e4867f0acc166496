#include "ahcrf/error.hpp"
#include "ahcrf/features.hpp"

namespace ahcrf {

std::vector<FrameWindow> segment_uniform(const FrameStream& stream, std::size_t windows) {
  const std::size_t frames = stream.frames.size();
  if (frames == 0) throw InvalidInput("segment_uniform: empty frame stream");
  if (windows == 0) throw InvalidInput("segment_uniform: window count must be >= 1");
  const std::size_t dim = stream.frames.front().size();
  for (const auto& frame : stream.frames) {
    if (frame.size() != dim) throw InvalidInput("segment_uniform: frames differ in dimension");
  }

  std::vector<FrameWindow> out(windows);
  for (std::size_t t = 0; t < windows; ++t) {
    const std::size_t begin = t * frames / windows;
    const std::size_t end = (t + 1) * frames / windows;
    for (std::size_t f = begin; f < end; ++f) out[t].push_back(f);
    if (out[t].empty()) out[t].push_back(begin > 0 ? begin - 1 : 0);
  }
  return out;
}

}  // namespace ahcrf
