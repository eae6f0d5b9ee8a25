#pragma once

// Seeded random SCMs and soundness trials that compare graph verdicts on the
// twin and teleporter graphs with the exact enumeration oracle.

#include "xworld/inference.hpp"
#include "xworld/scm.hpp"
#include "xworld/world.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace xworld {

struct GenConfig {
    std::uint64_t seed = 0;
    std::size_t n_endogenous = 4;      // 2..6
    std::size_t max_parents = 2;       // 1..3 endogenous parents per node
    std::size_t domain_size = 2;       // shared by every variable
    double confounder_probability = 0.3;
    std::uint32_t max_weight = 3;      // marginals are normalised integer weights in [1, max_weight]
    std::uint64_t cap = kDefaultEnumerationCap;
};

/// Throws std::invalid_argument("infeasible config: ...").
void check_config(const GenConfig& cfg);

/// DAG over V1..Vn in index order; each Vi has a dedicated exogenous parent U_Vi,
/// and each pair receives a shared exogenous confounder U_Vi_Vj with
/// probability cfg.confounder_probability while the state space stays under cfg.cap.
/// Equation tables are filled uniformly at random.
Model random_scm(const GenConfig& cfg);

/// Deterministic seed derivation (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

struct AdjustQuery {
    Assignment evidence;
    std::vector<std::string> adjust;
    std::string target_value;
};

/// a ⊥ b | cond in cross-world tokens, optionally with an adjustment
/// query for (X, b) where evidence ∪ adjust spans cond.
struct TrialQuery {
    std::string a;
    std::string b;
    std::vector<std::string> cond;
    std::optional<AdjustQuery> adjustment;
};

enum class AdjustStatus { not_applicable, estimated, inadmissible, positivity_violation, zero_evidence };
std::string_view to_string(AdjustStatus s);

struct QueryRecord {
    TrialQuery query;
    bool twin_separated = false;
    bool teleporter_separated = false;
    bool oracle_ci = false;
    AdjustStatus adjust_status = AdjustStatus::not_applicable;
    std::optional<Rational> estimate;
    std::optional<Rational> oracle;
    std::optional<Rational> delta;
    std::string note;  // error text for positivity / zero evidence
};

struct TrialSummary {
    std::size_t trials = 0;
    std::size_t queries = 0;
    std::size_t teleporter_unsound = 0;  // teleporter separated, oracle dependent
    std::size_t twin_unsound = 0;        // twin separated, oracle dependent
    std::size_t dominance_violations = 0;  // twin separated, teleporter connected
    std::size_t teleporter_only = 0;     // teleporter separated, twin connected
    std::size_t adjustments = 0;         // estimated
    std::size_t adjustment_mismatches = 0;
    std::size_t inadmissible = 0;
    std::size_t positivity_violations = 0;
    std::size_t duplicate_set_failures = 0;
    std::size_t semantic_failures = 0;
    std::size_t consistency_failures = 0;

    TrialSummary& operator+=(const TrialSummary& o);
};

struct TrialReport {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    Intervention intervention;
    std::vector<std::string> duplicates;
    bool duplicates_exact = false;
    bool semantic_agreement = false;
    bool consistency = false;
    std::vector<QueryRecord> records;
    TrialSummary summary;

    /// Header line followed by one line per query record.
    std::string to_jsonl() const;
};

/// Runs explicit queries against a model: builds both graphs, evaluates
/// every query and the structural checks.
TrialReport run_trial(const Model& model, const Intervention& iv, std::span<const TrialQuery> queries,
                      std::uint64_t cap = kDefaultEnumerationCap);

/// Random model, random intervention, `n_queries` random queries.
TrialReport soundness_trial(const GenConfig& cfg, std::size_t n_queries);

struct BatchReport {
    std::vector<TrialReport> trials;
    TrialSummary total;

    std::string to_jsonl() const;
};

/// Trial i uses derive_seed(base.seed, i). Rows are ordered by trial index
/// regardless of `threads`.
BatchReport run_trials(const GenConfig& base, std::size_t n_trials, std::size_t n_queries, unsigned threads = 1);

}  // namespace xworld
