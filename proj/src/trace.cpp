#include "lago/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iterator>
#include <sstream>

namespace lago {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSlotsFile = "trace.csv";
constexpr const char* kTasksFile = "tasks.csv";
constexpr const char* kNodesFile = "nodes.csv";

std::string join_numbers(const std::vector<double>& values, char sep) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0) out.push_back(sep);
        out += format_number(values[i]);
    }
    return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        fields.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return fields;
}

double parse_double(const std::string& s, const std::string& where) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw IoError(where + ": bad number '" + s + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& s, const std::string& where) {
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw IoError(where + ": bad integer '" + s + "'");
    return x;
}

std::vector<double> parse_list(const std::string& s, const std::string& where) {
    std::vector<double> out;
    if (s.empty()) return out;
    for (const std::string& f : split(s, ';')) out.push_back(parse_double(f, where));
    return out;
}

void write_preamble(std::ostream& os, const char* kind, const TraceMeta& meta) {
    os << "# lago " << kind << "\n"
       << "# format_version=" << meta.format_version << "\n"
       << "# n_fog=" << meta.n_fog << "\n"
       << "# seed=" << meta.seed << "\n"
       << "# checkpoint_every=" << meta.checkpoint_every << "\n"
       << "# budgets=" << join_numbers(meta.budgets, ';') << "\n"
       << "# initial_backlog=" << join_numbers(meta.initial_backlog, ';') << "\n";
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

struct CsvFile {
    TraceMeta meta;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvFile read_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    CsvFile file;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '#') {
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string value = line.substr(eq + 1);
            const std::string where = path.string() + ":" + std::to_string(line_no);
            if (key == "format_version") file.meta.format_version = static_cast<int>(parse_u64(value, where));
            else if (key == "n_fog") file.meta.n_fog = static_cast<std::uint32_t>(parse_u64(value, where));
            else if (key == "seed") file.meta.seed = parse_u64(value, where);
            else if (key == "checkpoint_every") file.meta.checkpoint_every = parse_u64(value, where);
            else if (key == "budgets") file.meta.budgets = parse_list(value, where);
            else if (key == "initial_backlog") file.meta.initial_backlog = parse_list(value, where);
            continue;
        }
        if (file.header.empty()) {
            file.header = split(line, ',');
            continue;
        }
        auto fields = split(line, ',');
        if (fields.size() != file.header.size())
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(file.header.size()) + " fields, got " + std::to_string(fields.size()));
        file.rows.push_back(std::move(fields));
    }
    if (file.meta.format_version != kTraceFormatVersion)
        throw IoError(path.string() + ": unsupported format_version " + std::to_string(file.meta.format_version));
    return file;
}

fs::path run_dir_of(const fs::path& path) {
    return fs::is_directory(path) ? path : path.parent_path();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string format_number(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

TraceWriter::TraceWriter(const fs::path& dir, TraceMeta meta) : dir_(dir), meta_(std::move(meta)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create directory " + dir_.string() + ": " + ec.message());
    if (meta_.initial_backlog.empty()) meta_.initial_backlog.assign(meta_.budgets.size(), 0.0);
    slots_ = open_output(dir_ / kSlotsFile);
    tasks_ = open_output(dir_ / kTasksFile);
    nodes_ = open_output(dir_ / kNodesFile);

    write_preamble(slots_, "trace", meta_);
    slots_ << "t,n_tasks,latency,expected_latency,oracle_latency,regret_increment,energy_total,backlog_total,"
              "estimate_hash";
    const std::size_t nodes = meta_.budgets.size();
    for (std::size_t n = 0; n < nodes; ++n) slots_ << ",E_" << n;
    for (std::size_t n = 0; n < nodes; ++n) slots_ << ",Q_" << n;
    slots_ << "\n";

    write_preamble(tasks_, "tasks", meta_);
    tasks_ << "t,ordinal,node,size_bits,work_cycles,eta,kappa,realized_rate,realized_freq,d_tr,d_pr\n";
    write_preamble(nodes_, "nodes", meta_);
    nodes_ << "t,node,count,mean_rho,mean_phi,rho_hat,phi_hat,backlog\n";
}

bool TraceWriter::is_checkpoint(std::uint64_t t) const noexcept {
    return meta_.checkpoint_every > 0 && t % meta_.checkpoint_every == 0;
}

void TraceWriter::write(const SlotTrace& trace, const LearnerState& learner) {
    const SlotRecord& r = trace.record;
    double energy_total = 0.0;
    for (double e : r.energy) energy_total += e;
    double backlog_total = 0.0;
    for (double q : r.backlog) backlog_total += q;
    slots_ << r.t << ',' << r.n_tasks << ',' << format_number(r.latency) << ',' << format_number(r.expected_latency)
           << ',' << format_number(r.oracle_latency) << ',' << format_number(trace.regret_increment()) << ','
           << format_number(energy_total) << ',' << format_number(backlog_total) << ',' << trace.estimate_hash;
    for (double e : r.energy) slots_ << ',' << format_number(e);
    for (double q : r.backlog) slots_ << ',' << format_number(q);
    slots_ << '\n';

    if (!is_checkpoint(r.t)) return;
    for (std::size_t i = 0; i < trace.tasks.size(); ++i) {
        const TaskOutcome& o = trace.tasks[i];
        tasks_ << r.t << ',' << i << ',' << o.node << ',' << format_number(o.size_bits) << ','
               << format_number(o.work_cycles) << ',' << format_number(o.eta) << ',' << format_number(o.kappa) << ','
               << format_number(o.realized_rate) << ',' << format_number(o.realized_freq) << ','
               << format_number(o.d_tr) << ',' << format_number(o.d_pr) << '\n';
    }
    for (std::size_t n = 0; n < learner.node_count(); ++n) {
        nodes_ << r.t << ',' << n << ',' << learner.counts[n] << ',' << format_number(learner.mean_rho[n]) << ','
               << format_number(learner.mean_phi[n]) << ',' << format_number(trace.estimates.rho_hat[n]) << ','
               << format_number(trace.estimates.phi_hat[n]) << ',' << format_number(r.backlog[n]) << '\n';
    }
    if (!slots_ || !tasks_ || !nodes_) throw IoError("write failed under " + dir_.string());
}

void TraceWriter::close() {
    for (std::ofstream* f : {&slots_, &tasks_, &nodes_}) {
        f->flush();
        if (!*f) throw IoError("write failed under " + dir_.string());
        f->close();
    }
}

TraceData read_trace(const fs::path& path) {
    const fs::path dir = run_dir_of(path);
    CsvFile slots = read_csv(dir / kSlotsFile);
    TraceData data;
    data.meta = slots.meta;
    const std::size_t nodes = data.meta.budgets.size();
    const std::size_t fixed = 9;
    if (slots.header.size() != fixed + 2 * nodes)
        throw IoError((dir / kSlotsFile).string() + ": header does not match " + std::to_string(nodes) + " nodes");
    for (const auto& row : slots.rows) {
        const std::string where = (dir / kSlotsFile).string();
        SlotRecord r;
        r.t = parse_u64(row[0], where);
        r.n_tasks = static_cast<std::uint32_t>(parse_u64(row[1], where));
        r.latency = parse_double(row[2], where);
        r.expected_latency = parse_double(row[3], where);
        r.oracle_latency = parse_double(row[4], where);
        data.regret_increments.push_back(parse_double(row[5], where));
        data.energy_totals.push_back(parse_double(row[6], where));
        data.backlog_totals.push_back(parse_double(row[7], where));
        data.estimate_hashes.push_back(row[8]);
        for (std::size_t n = 0; n < nodes; ++n) r.energy.push_back(parse_double(row[fixed + n], where));
        for (std::size_t n = 0; n < nodes; ++n) r.backlog.push_back(parse_double(row[fixed + nodes + n], where));
        data.records.push_back(std::move(r));
    }

    const fs::path tasks_path = dir / kTasksFile;
    if (fs::exists(tasks_path)) {
        CsvFile tasks = read_csv(tasks_path);
        for (const auto& row : tasks.rows) {
            const std::string where = tasks_path.string();
            const std::uint64_t t = parse_u64(row[0], where);
            TaskOutcome o;
            o.node = static_cast<NodeId>(parse_u64(row[2], where));
            o.size_bits = parse_double(row[3], where);
            o.work_cycles = parse_double(row[4], where);
            o.eta = parse_double(row[5], where);
            o.kappa = parse_double(row[6], where);
            o.realized_rate = parse_double(row[7], where);
            o.realized_freq = parse_double(row[8], where);
            o.d_tr = parse_double(row[9], where);
            o.d_pr = parse_double(row[10], where);
            data.tasks[t].push_back(o);
        }
    }
    return data;
}

std::string trace_content_hash(const fs::path& path) {
    const fs::path dir = run_dir_of(path);
    std::string bytes;
    for (const char* name : {kSlotsFile, kTasksFile, kNodesFile}) {
        bytes += slurp(dir / name);
        bytes.push_back('\0');
    }
    return sha256_hex(bytes);
}

VerifyReport verify_trace(const fs::path& path) {
    const TraceData data = read_trace(path);
    VerifyReport report;
    report.slots = data.records.size();
    const std::vector<double>& budgets = data.meta.budgets;
    const std::size_t nodes = budgets.size();
    auto problem = [&report](std::string text) {
        if (report.problems.size() < 50) report.problems.push_back(std::move(text));
    };
    if (nodes != std::size_t{data.meta.n_fog} + 1) problem("budgets do not cover n_fog + 1 nodes");

    std::vector<double> previous = data.meta.initial_backlog;
    if (previous.size() != nodes) previous.assign(nodes, 0.0);
    for (std::size_t k = 0; k < data.records.size(); ++k) {
        const SlotRecord& r = data.records[k];
        const std::string at = "slot " + std::to_string(r.t) + ": ";
        if (k > 0 && r.t != data.records[k - 1].t + 1) problem(at + "slots are not consecutive");

        double energy_total = 0.0;
        double backlog_total = 0.0;
        for (std::size_t n = 0; n < nodes; ++n) {
            energy_total += r.energy[n];
            backlog_total += r.backlog[n];
            const double drained = previous[n] - budgets[n] > 0.0 ? previous[n] - budgets[n] : 0.0;
            if (drained + r.energy[n] != r.backlog[n])
                problem(at + "queue update mismatch at node " + std::to_string(n));
        }
        if (energy_total != data.energy_totals[k]) problem(at + "energy_total mismatch");
        if (backlog_total != data.backlog_totals[k]) problem(at + "backlog_total mismatch");
        if (r.expected_latency - r.oracle_latency != data.regret_increments[k])
            problem(at + "regret_increment mismatch");
        previous = r.backlog;

        const bool checkpoint = data.meta.checkpoint_every > 0 && r.t % data.meta.checkpoint_every == 0;
        if (!checkpoint) continue;
        ++report.checkpoint_slots;
        auto it = data.tasks.find(r.t);
        const std::vector<TaskOutcome> empty;
        const std::vector<TaskOutcome>& tasks = it == data.tasks.end() ? empty : it->second;
        if (tasks.size() != r.n_tasks) {
            problem(at + "task detail rows do not match n_tasks");
            continue;
        }
        std::vector<double> energy(nodes, 0.0);
        double device_processing = 0.0;
        double device_transmission = 0.0;
        double latency = 0.0;
        for (const TaskOutcome& o : tasks) {
            if (o.node >= nodes) {
                problem(at + "task assigned to unknown node");
                continue;
            }
            if (o.node == kDevice) {
                device_processing += o.kappa * o.work_cycles;
                if (o.d_tr != 0.0) problem(at + "local task with nonzero transmission latency");
            } else {
                device_transmission += o.eta * o.size_bits;
                energy[o.node] += o.kappa * o.work_cycles;
                if (o.size_bits / o.realized_rate != o.d_tr) problem(at + "d_tr does not match L/R");
            }
            if (o.work_cycles / o.realized_freq != o.d_pr) problem(at + "d_pr does not match W/F");
            latency += o.d_tr + o.d_pr;
        }
        energy[kDevice] = device_processing + device_transmission;
        for (std::size_t n = 0; n < nodes; ++n)
            if (energy[n] != r.energy[n]) problem(at + "energy mismatch at node " + std::to_string(n));
        if (latency != r.latency) problem(at + "latency mismatch");
    }
    return report;
}

}  // namespace lago
