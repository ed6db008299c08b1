#include "falcon/params.hpp"

namespace falcon {

std::size_t ParamStore::add(const std::string& name, Matrix value) {
  if (index_.contains(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
  index_.emplace(name, entries_.size());
  entries_.push_back({name, std::move(value)});
  return entries_.size() - 1;
}

std::size_t ParamStore::slot(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter '" + name + "'");
  return it->second;
}

void ParamStore::check_finite() const {
  for (const auto& e : entries_)
    if (!e.value.allFinite()) throw NumericError("parameter '" + e.name + "' is not finite");
}

Gradients ParamStore::zeros() const {
  Gradients g;
  g.reserve(entries_.size());
  for (const auto& e : entries_) g.push_back(Matrix::Zero(e.value.rows(), e.value.cols()));
  return g;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += static_cast<std::size_t>(e.value.size());
  return n;
}

bool ParamStore::operator==(const ParamStore& o) const {
  if (entries_.size() != o.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = o.entries_[i];
    if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols() ||
        a.value != b.value)
      return false;
  }
  return true;
}

Adam::Adam(const ParamStore& params, AdamConfig cfg)
    : cfg_(cfg), m_(params.zeros()), v_(params.zeros()) {}

void Adam::step(ParamStore& params, const Gradients& grads) {
  if (grads.size() != m_.size()) throw std::invalid_argument("adam: gradient count mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].rows() != m_[i].rows() || grads[i].cols() != m_[i].cols())
      throw std::invalid_argument("adam: gradient shape mismatch for '" + params.name(i) + "'");
    if (!grads[i].allFinite())
      throw NumericError("adam: non-finite gradient for '" + params.name(i) + "'");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grads[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grads[i].cwiseAbs2();
    params.at(i).array() -=
        cfg_.lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + cfg_.eps);
  }
  params.check_finite();
}

Gradients finite_difference_grad(const std::function<double(const ParamStore&)>& loss,
                                 const ParamStore& params, double h) {
  ParamStore probe = params;
  Gradients out = params.zeros();
  for (std::size_t s = 0; s < params.size(); ++s) {
    for (Eigen::Index k = 0; k < params[s].size(); ++k) {
      double& x = probe.at(s).data()[k];
      const double orig = x;
      x = orig + h;
      const double up = loss(probe);
      x = orig - h;
      const double down = loss(probe);
      x = orig;
      out[s].data()[k] = (up - down) / (2.0 * h);
    }
  }
  return out;
}

}  // namespace falcon
