#pragma once

#include <cmath>
#include <limits>

namespace bsieve {

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Gamma(x) for x > 0.
double gamma_fn(double x);

/// log of the binomial coefficient (n choose k).
double log_binomial(int n, int k);

/// Accumulates sum(exp(log_terms)) without underflow; empty sum is -inf.
class LogSum {
 public:
  void add_log(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term <= max_) {
      scaled_ += std::exp(log_term - max_);
    } else {
      scaled_ = scaled_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }
  void add(const LogSum& other) {
    if (other.empty()) return;
    add_log(other.log());
  }
  bool empty() const { return max_ == -std::numeric_limits<double>::infinity(); }
  double log() const { return empty() ? max_ : max_ + std::log(scaled_); }
  double value() const { return empty() ? 0.0 : std::exp(log()); }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_ = 0.0;
};

}  // namespace bsieve
