#pragma once

#include <json.hpp>

#include "mst/env.hpp"
#include "mst/metrics.hpp"
#include "mst/semantics.hpp"
#include "mst/typecheck.hpp"

namespace mst {

using Json = nlohmann::ordered_json;

// Tree exports: one object per node, "node" names the variant.
Json to_json(const Name& n);
Json to_json(const ValuePtr& v);
Json to_json(const ProcPtr& p);
Json to_json(const STypePtr& s);
Json to_json(const VTypePtr& v);

Json to_json(const TypeEnv& env);
Json to_json(const ReductionEvent& e);
Json to_json(const CheckReport& r);
Json to_json(const MetricsReport& m);

// Top-level documents carry a versioned "schema" field.
Json document(const std::string& schema, Json body);

}  // namespace mst
