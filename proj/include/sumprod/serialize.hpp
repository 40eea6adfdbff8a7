#pragma once
// JSON forms of the result types. Non-finite doubles serialize as null.

#include "sumprod/bounds.hpp"
#include "sumprod/harness.hpp"
#include "sumprod/lambda_q.hpp"
#include "sumprod/regularize.hpp"
#include "sumprod/setops.hpp"

#include "json.hpp"

namespace sumprod {

using Json = nlohmann::ordered_json;

/// Numbers up to 2^64 - 1, decimal strings beyond.
Json count_json(Count c);

/// {"3.24": {"lhs", "rhs", "measured_ratio", "pass", "relation", "constant"}, ...}
Json ledger_json(const Ledger& l);

Json to_json(const IntSet& s);
Json to_json(const ExpSet& s);
Json to_json(const LambdaEstimate& e);
Json to_json(const Prop1Report& r);
Json to_json(const EnergyBound& e);
Json to_json(const RuzsaReport& r);
Json to_json(const LevelReport& r);
Json to_json(const BaseRefinement& r);
Json to_json(const RegularizationReport& r);
Json to_json(const AuditReport& r);
Json to_json(const FreimanAudit& a);
Json to_json(const AdmissibilityReport& r);
Json to_json(const TransformPoint& t);
Json to_json(const RecursionParams& p);
Json to_json(const KofB& k);
Json to_json(const ChainResult& c);
Json to_json(const DriverReport& d);
Json to_json(const ExperimentResult& r);
Json to_json(const VerifyReport& r);

}  // namespace sumprod
