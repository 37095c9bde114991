#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "lago/engine.hpp"
#include "lago/learner.hpp"
#include "lago/metrics.hpp"

namespace lago {

// A run directory holds three CSV files sharing a '#'-prefixed preamble:
//
//   trace.csv  one row per slot:
//              t,n_tasks,latency,expected_latency,oracle_latency,
//              regret_increment,energy_total,backlog_total,estimate_hash,
//              E_0..E_N,Q_0..Q_N            (Q after the slot's update)
//   tasks.csv  one row per task, checkpoint slots only:
//              t,ordinal,node,size_bits,work_cycles,eta,kappa,
//              realized_rate,realized_freq,d_tr,d_pr
//   nodes.csv  one row per node, checkpoint slots only (learner dump):
//              t,node,count,mean_rho,mean_phi,rho_hat,phi_hat,backlog
//
// A slot t is a checkpoint when checkpoint_every > 0 and t % checkpoint_every
// == 0. Numbers use the shortest round-trip decimal form.
inline constexpr int kTraceFormatVersion = 1;

struct TraceMeta {
    int format_version = kTraceFormatVersion;
    std::uint32_t n_fog = 0;
    std::uint64_t seed = 0;
    std::uint64_t checkpoint_every = 0;
    std::vector<double> budgets;
    std::vector<double> initial_backlog;  // Q(first slot); zeros for a fresh run
};

class TraceWriter {
public:
    TraceWriter(const std::filesystem::path& dir, TraceMeta meta);

    void write(const SlotTrace& trace, const LearnerState& learner);
    /// Flushes and closes the files; throws IoError on failure.
    void close();

    [[nodiscard]] bool is_checkpoint(std::uint64_t t) const noexcept;

private:
    std::filesystem::path dir_;
    TraceMeta meta_;
    std::ofstream slots_, tasks_, nodes_;
};

struct TraceData {
    TraceMeta meta;
    std::vector<SlotRecord> records;
    std::vector<double> regret_increments;
    std::vector<double> energy_totals;
    std::vector<double> backlog_totals;
    std::vector<std::string> estimate_hashes;
    std::map<std::uint64_t, std::vector<TaskOutcome>> tasks;  // checkpoint slots
};

/// Reads a run directory (or the trace.csv inside it).
TraceData read_trace(const std::filesystem::path& path);

/// SHA-256 over trace.csv, tasks.csv and nodes.csv, in that order.
std::string trace_content_hash(const std::filesystem::path& dir);

struct VerifyReport {
    std::uint64_t slots = 0;
    std::uint64_t checkpoint_slots = 0;
    std::vector<std::string> problems;

    [[nodiscard]] bool ok() const noexcept { return problems.empty(); }
};

/// Replays the stored decisions and draws: recomputes energies and
/// latencies at checkpoint slots, and every queue update and total, then
/// compares bit-for-bit with what was written.
VerifyReport verify_trace(const std::filesystem::path& path);

std::string format_number(double x);

}  // namespace lago
