#include "ragattr/estimators.hpp"

namespace ragattr {

AttributionVector run_method(Method method, const QueryCase& c, UtilityOracle& oracle,
                             const EstimatorSettings& settings) {
  settings.validate();
  AttributionVector out;
  switch (method) {
    case Method::kShapley: out = exact_shapley(c, oracle, settings.parallelism); break;
    case Method::kLoo: out = leave_one_out(c, oracle, settings.parallelism); break;
    case Method::kTmc: out = tmc_shapley(c, oracle, settings); break;
    case Method::kBeta: out = beta_shapley(c, oracle, settings); break;
    case Method::kKernelShap: out = kernel_shap(c, oracle, settings); break;
    case Method::kContextCite: out = context_cite(c, oracle, settings); break;
  }
  out.method = method;
  out.case_id = c.case_id;
  out.seed = settings.seed;
  return out;
}

AttributionVector run_method(std::string_view method, const QueryCase& c, UtilityOracle& oracle,
                             const EstimatorSettings& settings) {
  return run_method(parse_method(method), c, oracle, settings);
}

}  // namespace ragattr
