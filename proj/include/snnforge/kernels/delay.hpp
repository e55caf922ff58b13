#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace snnforge {

// Fixed-length FIFO of arrays: the value returned by push_pop at call t is the
// one pushed at call t - steps, or zeros during warm-up.
class DelayBuffer {
 public:
  DelayBuffer() = default;
  DelayBuffer(std::size_t steps, std::size_t width)
      : steps_(steps), width_(width), slots_((steps + 1) * width, 0.0) {}

  std::size_t steps() const { return steps_; }
  std::size_t width() const { return width_; }
  std::size_t head() const { return head_; }

  void push_pop(std::span<const double> x, std::span<double> y) {
    std::copy(x.begin(), x.end(), slots_.begin() + static_cast<std::ptrdiff_t>(head_ * width_));
    const std::size_t read = (head_ + 1) % (steps_ + 1);
    const auto src = slots_.begin() + static_cast<std::ptrdiff_t>(read * width_);
    std::copy(src, src + static_cast<std::ptrdiff_t>(width_), y.begin());
    head_ = read;
  }

  void clear() {
    std::fill(slots_.begin(), slots_.end(), 0.0);
    head_ = 0;
  }

  // Raw access for persistence.
  const std::vector<double>& slots() const { return slots_; }
  void restore(std::vector<double> slots, std::size_t head) {
    slots_ = std::move(slots);
    head_ = head;
  }

 private:
  std::size_t steps_ = 0;
  std::size_t width_ = 0;
  std::vector<double> slots_;
  std::size_t head_ = 0;
};

}  // namespace snnforge
