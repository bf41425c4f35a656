#pragma once

#include <cstddef>
#include <vector>

namespace meshrft {

struct WindowStep {
  std::size_t context_start = 0;
  std::size_t context_end = 0;  ///< exclusive; always the emit position
  std::size_t emit_position = 0;

  std::size_t context_length() const noexcept { return context_end - context_start; }
};

/// First position at which the window slides: ceil(0.4 * W).
std::size_t sliding_start(std::size_t train_window);
/// Tokens kept once sliding: floor(0.3 * W).
std::size_t sliding_keep(std::size_t train_window);

/// Context used to emit each position of a stream of `stream_length` tokens.
/// Before sliding_start the context is the whole prefix; from then on only
/// the most recent sliding_keep tokens. Requires W >= 10 and L >= 1.
std::vector<WindowStep> sliding_window_schedule(std::size_t train_window,
                                                std::size_t stream_length);

}  // namespace meshrft
