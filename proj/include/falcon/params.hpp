#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "falcon/tape.hpp"

namespace falcon {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named dense parameters. Shapes are fixed once added.
class ParamStore {
 public:
  std::size_t add(const std::string& name, Matrix value);

  std::size_t size() const { return entries_.size(); }
  const std::string& name(std::size_t slot) const { return entries_.at(slot).name; }
  const Matrix& operator[](std::size_t slot) const { return entries_[slot].value; }
  /// Mutable access keeps the shape: assigning a differently sized matrix
  /// through it is a logic error caught by check_shapes().
  Matrix& at(std::size_t slot) { return entries_.at(slot).value; }
  std::size_t slot(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.contains(name); }

  /// Throws NumericError naming the first parameter holding NaN/Inf.
  void check_finite() const;
  /// Zero matrices shaped like every parameter.
  Gradients zeros() const;
  std::size_t scalar_count() const;

  bool operator==(const ParamStore& o) const;

 private:
  struct Entry {
    std::string name;
    Matrix value;
  };
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct AdamConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction; moments shaped like the store it was created for.
class Adam {
 public:
  Adam(const ParamStore& params, AdamConfig cfg);

  /// Throws NumericError naming the parameter if a gradient is non-finite.
  void step(ParamStore& params, const Gradients& grads);
  long steps_taken() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  Gradients m_, v_;
  long t_ = 0;
};

/// Central differences, one coordinate at a time. Test oracle for backward().
Gradients finite_difference_grad(const std::function<double(const ParamStore&)>& loss,
                                 const ParamStore& params, double h = 1e-5);

}  // namespace falcon
