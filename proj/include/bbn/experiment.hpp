#ifndef BBN_EXPERIMENT_HPP
#define BBN_EXPERIMENT_HPP

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bbn/mac.hpp"
#include "bbn/mobility.hpp"
#include "bbn/scenario.hpp"

namespace bbn {

struct RunSpec {
    ProtocolKind protocol = ProtocolKind::gpsr;
    Tech tech = Tech::wifi;
    std::uint32_t payload = 64;
    std::uint64_t seed = 1;
};

struct RunOptions {
    /// Use this trace instead of generating one from the seed.
    const MobilityTrace* trace = nullptr;
    std::ostream* event_log = nullptr;
};

struct RunResult {
    RunSpec spec;
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::array<std::uint64_t, kDropReasonCount> drops{};
    std::uint64_t in_flight = 0;
    std::optional<double> mean_delay;  ///< seconds, absent without deliveries
    double total_energy_mj = 0.0;
    std::vector<double> node_energy_mj;
    std::uint64_t transmissions = 0;
    std::uint64_t collisions = 0;
    MacStats mac;  ///< summed over nodes
    std::uint64_t events = 0;
    std::string config_hash;

    std::uint64_t total_drops() const;
};

/// Simulates one (protocol, technology, payload, seed) combination. Throws
/// ConfigError for a payload the technology cannot carry and
/// std::logic_error if packet conservation fails.
RunResult run_once(const Scenario& scenario, const RunSpec& spec, const RunOptions& options = {});

/// delivered / sent; throws std::invalid_argument when nothing was sent.
double prr(const RunResult& r);

/// Arithmetic mean; absent for an empty sample.
std::optional<double> mean_delay(std::span<const double> delays);

struct Stat {
    std::size_t n = 0;
    double mean = 0.0;
    std::optional<double> ci95;  ///< Student-t half-width, absent for n < 2
    double min = 0.0;
    double max = 0.0;
};

/// Mean and 95% confidence half-width over iteration values.
Stat aggregate(std::span<const double> samples);

/// Two-sided 95% Student-t quantile for the given degrees of freedom.
double t_quantile_95(std::size_t dof);

struct CellSummary {
    ProtocolKind protocol = ProtocolKind::gpsr;
    Tech tech = Tech::wifi;
    std::uint32_t payload = 0;
    Stat prr;
    std::optional<Stat> delay_ms;  ///< over runs that delivered something
    Stat energy_mj;
};

/// One summary per (protocol, tech, payload) present, in first-seen order.
std::vector<CellSummary> summarize(std::span<const RunResult> runs);

enum class Grade { high, medium, low, worst };
std::string_view to_string(Grade g);

Grade classify_prr(double prr, const ClassificationThresholds& t);

struct ClassRow {
    ProtocolKind protocol = ProtocolKind::gpsr;
    Tech tech = Tech::wifi;
    double prr = 0.0;                 ///< mean over payloads
    std::optional<double> delay_ms;   ///< mean over payloads with deliveries
    double energy_mj = 0.0;
    Grade prr_grade = Grade::worst;
    Grade delay_grade = Grade::worst;
    Grade energy_grade = Grade::worst;
};

/// Table-style grid: PRR by threshold, delay and energy by terciles within
/// each technology (Worst for cells that delivered nothing).
std::vector<ClassRow> classify(std::span<const CellSummary> cells, const ClassificationThresholds& t);

// ---- files --------------------------------------------------------------

void write_runs_csv(std::ostream& out, std::span<const RunResult> runs, const std::string& hash);
void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells, const std::string& hash);
void write_classification(std::ostream& out, std::span<const ClassRow> rows, const ClassificationThresholds& t,
                          const std::string& hash);
void write_node_energy_csv(std::ostream& out, std::span<const RunResult> runs, const std::string& hash);
/// Python/matplotlib script plotting PRR, delay and energy against payload.
void write_plot_script(std::ostream& out, const std::string& summary_csv, const std::string& hash);

/// Reads a runs CSV written by write_runs_csv. Throws std::runtime_error
/// with the line number on malformed input.
std::vector<RunResult> read_runs_csv(std::istream& in);

// ---- sweeps -------------------------------------------------------------

struct SweepFilter {
    std::optional<ProtocolKind> protocol;
    std::optional<Tech> tech;
    std::optional<std::uint32_t> payload;
    std::optional<std::uint64_t> seed;
    bool accepts(const RunSpec& s) const;
};

/// Parses `key=value` with key in {protocol, tech, payload, seed}; merges
/// into the filter. Throws std::invalid_argument.
void apply_filter(SweepFilter& f, const std::string& expr);

/// Every run of the scenario in canonical order: protocol, technology,
/// payload, iteration. Iteration i uses seed = scenario.seed + i.
std::vector<RunSpec> sweep_plan(const Scenario& scenario, const SweepFilter& filter = {});

struct SweepOutcome {
    std::vector<RunResult> results;  ///< successful runs in plan order
    std::vector<std::pair<RunSpec, std::string>> failures;
};

/// Runs the plan on `threads` workers (0 = hardware concurrency). Traces are
/// generated once per seed. `progress` is called from the workers.
SweepOutcome run_sweep(const Scenario& scenario, std::span<const RunSpec> plan, unsigned threads = 0,
                       const std::function<void(const RunSpec&, std::size_t done, std::size_t total)>& progress = {},
                       const MobilityTrace* trace = nullptr);

}  // namespace bbn

#endif
