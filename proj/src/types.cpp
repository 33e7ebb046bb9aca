#include "qgamma/types.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace qgamma {

QParam::QParam(double q) : q_(q), log_q_(0.0), branch_(Branch::Classical) {
  if (!(q > 0.0) || !std::isfinite(q))
    throw DomainError("q must be a finite positive number");
  log_q_ = std::log(q);
  if (q < 1.0)
    branch_ = Branch::SubUnit;
  else if (q > 1.0)
    branch_ = Branch::SuperUnit;
}

Eval Eval::scaled(double k) const {
  const double v = value * k;
  return {v, std::abs(k) * err + std::numeric_limits<double>::epsilon() * std::abs(v)};
}

TruncationPolicy TruncationPolicy::from_env() {
  TruncationPolicy pol;
  if (const char* env = std::getenv("QGAMMA_MAX_TERMS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
      throw DomainError("QGAMMA_MAX_TERMS must be a positive integer");
    pol.max_terms = static_cast<std::size_t>(v);
  }
  return pol;
}

void TruncationPolicy::validate() const {
  if (!(target_tol > 0.0) || !std::isfinite(target_tol))
    throw DomainError("target_tol must be positive");
  if (max_terms < 1) throw DomainError("max_terms must be at least 1");
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::SubUnit: return "SubUnit";
    case Branch::Classical: return "Classical";
    case Branch::SuperUnit: return "SuperUnit";
  }
  return "?";
}

}  // namespace qgamma
