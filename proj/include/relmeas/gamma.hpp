#pragma once

#include <functional>
#include <vector>

#include "relmeas/error.hpp"
#include "relmeas/rational.hpp"

namespace relmeas {

// Interval coding of a list: [0,1] is cut into one half-open cell per item
// (equal cells for finite lists, dyadic cells [1-2^-i, 1-2^-(i+1)) for
// infinite ones) and y selects the item of its cell. y = 1 selects item 0.
template <class T>
class IntervalCode {
 public:
  static IntervalCode finite_list(std::vector<T> items) {
    if (items.empty()) throw Error("EmptyCode", "interval code over no items");
    IntervalCode c;
    c.items_ = std::move(items);
    return c;
  }

  static IntervalCode infinite_list(std::function<T(int)> gen) {
    IntervalCode c;
    c.gen_ = std::move(gen);
    c.infinite_ = true;
    return c;
  }

  bool infinite() const { return infinite_; }
  int finite_size() const { return static_cast<int>(items_.size()); }

  T item(int i) const { return infinite_ ? gen_(i) : items_.at(i); }

  int index_of(const Rat& y) const {
    if (y < 0 || y > 1) throw Error("OutOfDomain", rat_str(y));
    if (y == 1) return 0;
    if (!infinite_) {
      BigInt i = numerator(y) * finite_size() / denominator(y);
      return static_cast<int>(i);
    }
    Rat tail = 1 - y;           // in (0,1]; cell i has 2^-(i+1) < tail <= 2^-i
    Rat cell(1, 2);
    int i = 0;
    while (tail <= cell) {
      cell /= 2;
      ++i;
    }
    return i;
  }

 private:
  std::vector<T> items_;
  std::function<T(int)> gen_;
  bool infinite_ = false;
};

template <class T>
T gamma_eval(const IntervalCode<T>& code, const Rat& y) {
  return code.item(code.index_of(y));
}

}  // namespace relmeas
