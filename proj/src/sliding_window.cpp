#include "meshrft/sliding_window.hpp"

#include "meshrft/errors.hpp"

namespace meshrft {

// Integer forms avoid rounding in 0.4 * W and 0.3 * W.
std::size_t sliding_start(std::size_t train_window) { return (4 * train_window + 9) / 10; }
std::size_t sliding_keep(std::size_t train_window) { return (3 * train_window) / 10; }

std::vector<WindowStep> sliding_window_schedule(std::size_t train_window,
                                                std::size_t stream_length) {
  if (train_window < 10) throw InputError("training window must be at least 10 tokens");
  if (stream_length < 1) throw InputError("stream length must be positive");
  const std::size_t start = sliding_start(train_window);
  const std::size_t keep = sliding_keep(train_window);

  std::vector<WindowStep> out;
  out.reserve(stream_length);
  for (std::size_t pos = 0; pos < stream_length; ++pos) {
    const std::size_t begin = pos < start ? 0 : pos - keep;
    out.push_back({begin, pos, pos});
  }
  return out;
}

}  // namespace meshrft
