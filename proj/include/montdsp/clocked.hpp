#pragma once

#include <cstddef>
#include <vector>

namespace montdsp {

/// Fixed-depth shift register. push() advances one clock and returns the
/// value that entered `depth` clocks earlier (the input itself for depth 0).
template <typename T>
class DelayLine {
 public:
  explicit DelayLine(std::size_t depth = 0) : buf_(depth) {}

  std::size_t depth() const { return buf_.size(); }

  T push(const T& in) {
    if (buf_.empty()) return in;
    T out = buf_[head_];
    buf_[head_] = in;
    head_ = (head_ + 1) % buf_.size();
    return out;
  }

  void clear() {
    for (auto& v : buf_) v = T{};
  }

 private:
  std::vector<T> buf_;
  std::size_t head_ = 0;
};

/// Keeps the last `capacity` inputs so pipeline stages can read the value
/// presented `age` cycles ago (age 0 is the current input).
template <typename T>
class History {
 public:
  explicit History(std::size_t capacity) : buf_(capacity) {}

  void push(const T& in) {
    head_ = (head_ + 1) % buf_.size();
    buf_[head_] = in;
  }

  const T& at(std::size_t age) const { return buf_[(head_ + buf_.size() - age % buf_.size()) % buf_.size()]; }

  void clear() {
    for (auto& v : buf_) v = T{};
  }

 private:
  std::vector<T> buf_;
  std::size_t head_ = 0;
};

}  // namespace montdsp
