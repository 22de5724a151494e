// casediar/gradcheck.hpp

// Copyright 2026  case-diar authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CASEDIAR_GRADCHECK_HPP_
#define CASEDIAR_GRADCHECK_HPP_

#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "casediar/params.hpp"

namespace casediar {
namespace ndiff {

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Central-difference verification of the analytic gradient. `build_loss`
/// must rebuild the same forward graph from the current store contents and
/// return the 1x1 loss node; it is invoked 2 * parameter_count + 1 times.
/// Entries where both gradients are below 1e-7 in magnitude are skipped.
inline GradCheckResult finite_diff_check(ParamStore& ps,
                                         const std::function<Var()>& build_loss,
                                         double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw std::invalid_argument("finite_diff_check: epsilon must lie in [1e-7, 1e-3]");
  }
  ps.zero_grads();
  backward(build_loss());
  std::map<std::string, Tensor2> analytic;
  for (const std::string& name : ps.names()) analytic[name] = ps.grad(name);

  GradCheckResult result;
  for (const std::string& name : ps.names()) {
    Tensor2& value = ps.value(name);
    const Tensor2& an = analytic[name];
    for (std::size_t i = 0; i < value.data.size(); ++i) {
      const double saved = value.data[i];
      value.data[i] = saved + epsilon;
      const double f_plus = scalar(build_loss());
      value.data[i] = saved - epsilon;
      const double f_minus = scalar(build_loss());
      value.data[i] = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * epsilon);
      const double denom = std::max(std::abs(numeric), std::abs(an.data[i]));
      if (denom < 1e-7) continue;
      const double err = std::abs(numeric - an.data[i]) / denom;
      if (err > result.max_rel_err) {
        result.max_rel_err = err;
        result.worst_param = name;
        result.worst_index = i;
        result.worst_analytic = an.data[i];
        result.worst_numeric = numeric;
      }
    }
  }
  ps.zero_grads();
  return result;
}

}  // namespace ndiff
}  // namespace casediar

#endif  // CASEDIAR_GRADCHECK_HPP_
