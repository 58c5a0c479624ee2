#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "hbubble/alpha_solver.hpp"
#include "hbubble/blowup.hpp"
#include "hbubble/functionals.hpp"
#include "hbubble/mountain_pass.hpp"

namespace hbubble::harness {

using Json = nlohmann::ordered_json;

// Pretty-printed JSON with %.17g floats, `null` for non-finite values and
// LF newlines. nlohmann's own dump prints the shortest round-trip form, which
// is not what the report format promises.
std::string dump(const Json& j, int indent = 2);
std::string dump_line(const Json& j);

Json number(double v);
Json number(const std::optional<double>& v);

Json to_json(const EnergyBreakdown& e);
Json to_json(const RadialPathProfile& p, bool with_samples);
Json to_json(const MountainPassEstimate& e);
Json to_json(const BoundsReport& b);
Json to_json(const LambdaCheck& c);
Json to_json(const TruncationCheck& c);
Json to_json(const LocalMinimumCheck& c);
Json to_json(const AlphaSolveState& s);  // summary, no node values
Json to_json(const H1BoundsReport& r);
Json to_json(const LinftyReport& r);
Json to_json(const LambdaEstimate& e);
Json to_json(const BlowUpRecord& r);  // one JSON-lines trace record
Json to_json(const LimitDiagnostics& d);
Json to_json(const SemicontinuityReport& r);
Json summary(const BlowUpTrace& t);

}  // namespace hbubble::harness
