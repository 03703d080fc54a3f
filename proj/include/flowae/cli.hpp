#ifndef FLOWAE_CLI_HPP
#define FLOWAE_CLI_HPP

// Pipeline subcommands behind the `flowae` tool:
//   synth | extract | train | tune | detect | attribute | sweep | report
// Exit codes: 0 success, 1 usage error, 2 data error.
// FLOWAE_LOG=quiet|info|debug sets stderr verbosity (default info).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "detection.hpp"
#include "flow_extract.hpp"
#include "interpretation.hpp"
#include "persistence.hpp"
#include "synth_data.hpp"

namespace flowae::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

enum class LogLevel { quiet, info, debug };

inline LogLevel log_level_from_env()
{
    const char* v = std::getenv("FLOWAE_LOG");
    if (v == nullptr) {
        return LogLevel::info;
    }
    const std::string s(v);
    if (s == "quiet" || s == "0") {
        return LogLevel::quiet;
    }
    if (s == "debug" || s == "2") {
        return LogLevel::debug;
    }
    return LogLevel::info;
}

class Log {
public:
    Log(std::ostream& err, LogLevel level) : err_(err), level_(level) {}

    void info(const std::string& msg) const { emit(LogLevel::info, "", msg); }
    void debug(const std::string& msg) const { emit(LogLevel::debug, "debug: ", msg); }
    void warn(const std::string& msg) const
    {
        if (level_ != LogLevel::quiet) {
            err_ << "warning: " << msg << '\n';
        }
    }

private:
    void emit(LogLevel at, const char* prefix, const std::string& msg) const
    {
        if (static_cast<int>(level_) >= static_cast<int>(at)) {
            err_ << prefix << msg << '\n';
        }
    }

    std::ostream& err_;
    LogLevel level_;
};

/// Options shared by every subcommand, filled by CLI11.
struct RunConfig {
    std::uint64_t seed = 0;
    std::string out;
    std::string out_dir = ".";

    // synth
    std::string profile;
    std::vector<std::string> scenarios;
    SplitSizes sizes;
    bool packets = false;
    std::optional<double> noise_rate;

    // extract
    std::string packets_in;
    double window = kDefaultWindow;
    std::uint64_t first_id = 0;

    // train / tune
    std::string train_csv;
    std::string threshold_csv;
    std::string validation_csv;
    HyperParams hyper;
    std::vector<int> layer_dims = kDefaultLayerDims;
    std::string timestamp;
    int trials = 10;

    // detect / attribute / sweep
    std::string bundle;
    std::string flows_csv;
    std::string metrics_out;
    std::string target;
    std::string grid;
    std::size_t base_flows = kDefaultBaseFlows;

    // report
    std::vector<std::string> metrics_in;
};

namespace detail {

inline std::ifstream open_input(const std::string& path, const char* what)
{
    if (path.empty()) {
        throw Error(std::string("no ") + what + " given");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(std::string("cannot open ") + what + " '" + path + "'");
    }
    return in;
}

inline FlowTable load_flows(const std::string& path, const char* what)
{
    auto in = open_input(path, what);
    try {
        return read_flow_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// Writes `content` via a temporary file and rename, so a failed write
/// leaves no partial output.
inline void write_file(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write '" + path + "'");
        }
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error("failed writing '" + path + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot write '" + path + "'");
    }
}

inline std::vector<RawFeatureVector> benign_features(const FlowTable& t, const Log& log,
                                                     const std::string& name)
{
    std::vector<RawFeatureVector> out;
    std::size_t skipped = 0;
    for (const auto& r : t.rows) {
        if (r.label == Label::malicious) {
            ++skipped;
            continue;
        }
        out.push_back(r.features);
    }
    if (skipped > 0) {
        log.warn(name + ": ignoring " + std::to_string(skipped) + " malicious-labeled rows");
    }
    if (out.empty()) {
        throw Error(name + ": no benign flows");
    }
    return out;
}

inline std::string hyper_summary(const HyperParams& h)
{
    std::ostringstream s;
    s << "batch " << h.batch_size << ", lr " << h.learning_rate << ", dropout " << h.dropout_ratio
      << ", decay " << h.weight_decay << ", epochs " << h.epochs << ", seed " << h.seed;
    return s.str();
}

inline std::string fmt(const std::optional<double>& v)
{
    if (!v) {
        return "n/a";
    }
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(4);
    s << *v;
    return s.str();
}

/// "a,b,c" or "lo:hi:step" (inclusive). size_pair takes "max:min" pairs
/// separated by commas.
inline std::vector<SweepPoint> parse_grid(const std::string& text, const SweepTarget& t)
{
    std::vector<SweepPoint> g;
    const csv::Where w{0, "grid"};
    if (t.kind == SweepKind::size_pair) {
        for (auto cell : csv::split(text)) {
            const auto colon = cell.find(':');
            if (colon == std::string_view::npos) {
                throw InvalidArgument("size_pair grid entries are max:min");
            }
            g.push_back({csv::parse_double(cell.substr(0, colon), w),
                         csv::parse_double(cell.substr(colon + 1), w)});
        }
        return g;
    }
    if (std::count(text.begin(), text.end(), ':') == 2 && text.find(',') == std::string::npos) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        const double lo = csv::parse_double(std::string_view(text).substr(0, a), w);
        const double hi = csv::parse_double(std::string_view(text).substr(a + 1, b - a - 1), w);
        const double step = csv::parse_double(std::string_view(text).substr(b + 1), w);
        if (!(step > 0.0) || hi < lo) {
            throw InvalidArgument("grid lo:hi:step needs step > 0 and hi >= lo");
        }
        for (std::size_t k = 0;; ++k) {
            const double v = lo + static_cast<double>(k) * step;
            if (v > hi) {
                break;
            }
            g.push_back({v});
        }
        return g;
    }
    for (auto cell : csv::split(text)) {
        g.push_back({csv::parse_double(cell, w)});
    }
    return g;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Subcommands

inline void cmd_synth(const RunConfig& c, std::ostream& out, const Log& log)
{
    namespace fs = std::filesystem;
    if (!fs::is_directory(c.out_dir)) {
        throw Error("output directory '" + c.out_dir + "' does not exist");
    }
    BenignProfile profile;
    if (!c.profile.empty()) {
        auto in = detail::open_input(c.profile, "profile");
        profile = read_profile(in);
    }
    if (c.noise_rate) {
        profile.noise_rate = *c.noise_rate;
    }
    std::vector<AttackScenario> scenarios;
    for (const auto& s : c.scenarios) {
        scenarios.push_back({parse_category(s)});
    }
    if (scenarios.empty()) {
        for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
            scenarios.push_back({static_cast<Category>(i)});
        }
    }
    log.debug("generating splits with seed " + std::to_string(c.seed));
    const auto d = make_datasets(profile, scenarios, c.sizes, c.seed, c.packets);

    std::vector<std::pair<std::string, std::string>> files;
    DatasetManifest manifest{c.seed, {}};
    for (const auto& [name, split] : {std::pair<const char*, const LabeledDataset*>{"train", &d.train},
                                      {"threshold", &d.threshold},
                                      {"validation", &d.validation},
                                      {"test", &d.test}}) {
        std::ostringstream s;
        write_flow_csv(s, split->table());
        const std::string file = std::string(name) + ".csv";
        files.emplace_back(file, s.str());
        manifest.entries.push_back({name, file, split->flows.size(),
                                    dataset_checksum(features_of(split->flows))});
        if (c.packets) {
            std::ostringstream p;
            write_packet_records(p, split->packets);
            files.emplace_back(std::string(name) + ".packets.csv", p.str());
        }
    }
    std::ostringstream m;
    write_manifest(m, manifest);
    files.emplace_back("manifest.json", m.str());

    std::vector<std::string> written;
    try {
        for (const auto& [file, content] : files) {
            const auto path = (fs::path(c.out_dir) / file).string();
            detail::write_file(path, content);
            written.push_back(path);
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) {
            fs::remove(p, ec);
        }
        throw;
    }
    out << "wrote " << files.size() << " files to " << c.out_dir << '\n';
}

inline void cmd_extract(const RunConfig& c, std::ostream& out, const Log& log)
{
    auto in = detail::open_input(c.packets_in, "packet file");
    std::vector<PacketRecord> packets;
    try {
        packets = parse_packet_records(in);
    } catch (const ParseError& e) {
        throw ParseError(c.packets_in + ": " + e.what());
    }
    const auto flows = aggregate_flows(std::move(packets), c.window);
    std::ostringstream s;
    write_flow_csv(s, to_flow_table(flows, c.first_id));
    if (c.out.empty()) {
        out << s.str();
    } else {
        detail::write_file(c.out, s.str());
        log.info("extracted " + std::to_string(flows.size()) + " flows to " + c.out);
    }
}

inline ModelBundle train_bundle(const RunConfig& c, const Log& log)
{
    const auto train_t = detail::load_flows(c.train_csv, "training file");
    const auto thr_t = detail::load_flows(c.threshold_csv, "threshold file");
    const auto train = detail::benign_features(train_t, log, c.train_csv);
    const auto thr = detail::benign_features(thr_t, log, c.threshold_csv);
    HyperParams h = c.hyper;
    h.seed = c.seed;
    log.info("training on " + std::to_string(train.size()) + " flows (" + detail::hyper_summary(h)
             + ")");
    auto b = fit_bundle(train, thr, h, c.layer_dims);
    b.meta.timestamp = c.timestamp;
    return b;
}

inline void cmd_train(const RunConfig& c, std::ostream& out, const Log& log)
{
    if (c.out.empty()) {
        throw Error("no output bundle path given (--out)");
    }
    const auto b = train_bundle(c, log);
    std::ostringstream s;
    write_bundle(s, b);
    detail::write_file(c.out, s.str());
    out << "final_loss " << csv::format_double(b.meta.final_loss) << '\n';
    out << "t_det " << csv::format_double(b.threshold.t_det) << '\n';
}

inline void cmd_tune(const RunConfig& c, std::ostream& out, const Log& log)
{
    if (c.out.empty()) {
        throw Error("no output bundle path given (--out)");
    }
    const auto train_t = detail::load_flows(c.train_csv, "training file");
    const auto thr_t = detail::load_flows(c.threshold_csv, "threshold file");
    const auto val_t = detail::load_flows(c.validation_csv, "validation file");
    if (!val_t.has_label) {
        throw Error(c.validation_csv + ": validation flows need a label column");
    }
    const auto train = detail::benign_features(train_t, log, c.train_csv);
    const auto thr = detail::benign_features(thr_t, log, c.threshold_csv);

    ModelBundle baseline;
    if (!c.bundle.empty()) {
        baseline = load_bundle(c.bundle);
    } else {
        HyperParams h = c.hyper;
        h.seed = c.seed;
        log.info("training baseline (" + detail::hyper_summary(h) + ")");
        baseline = fit_bundle(train, thr, h, c.layer_dims);
        baseline.meta.timestamp = c.timestamp;
    }
    const auto r = random_search_tune(std::move(baseline), {train, thr, val_t.rows}, SearchSpace{},
                                      c.trials, c.seed);
    out << "baseline f1 " << detail::fmt(r.baseline_metrics.f1) << '\n';
    if (!r.tuned) {
        out << "baseline passes the 0.99 gate; kept\n";
    } else {
        for (const auto& t : r.trials) {
            out << "trial " << t.index << ": " << detail::hyper_summary(t.hyper) << " -> f1 "
                << detail::fmt(t.metrics.f1) << '\n';
        }
        out << "best trial " << r.best_trial << '\n';
    }
    std::ostringstream s;
    write_bundle(s, r.best);
    detail::write_file(c.out, s.str());
}

inline void cmd_detect(const RunConfig& c, std::ostream& out, const Log& log)
{
    const auto b = load_bundle(c.bundle);
    const auto t = detail::load_flows(c.flows_csv, "flow file");
    const auto verdicts = detect(b, t.rows);
    std::ostringstream v;
    write_verdicts(v, verdicts);
    if (c.out.empty()) {
        out << v.str();
    } else {
        detail::write_file(c.out, v.str());
    }
    std::size_t flagged = 0;
    for (const auto& x : verdicts) {
        flagged += x.malicious ? 1 : 0;
    }
    log.info(std::to_string(flagged) + " of " + std::to_string(verdicts.size())
             + " flows flagged malicious (t_det " + csv::format_double(b.threshold.t_det) + ")");
    if (!t.has_label) {
        if (!c.metrics_out.empty()) {
            log.warn("flows are unlabeled; no metrics written");
        }
        return;
    }
    std::vector<Label> labels;
    for (const auto& r : t.rows) {
        if (!r.label) {
            throw ParseError(c.flows_csv + ": flow " + std::to_string(r.id) + " has no label");
        }
        labels.push_back(*r.label);
    }
    json j{{"flows", verdicts.size()},
           {"t_det", b.threshold.t_det},
           {"metrics", to_json(evaluate(verdicts, labels))}};
    if (t.has_category) {
        j["per_category"] = to_json(per_category_recall(verdicts, t.rows));
    }
    const std::string text = j.dump(2) + "\n";
    if (c.metrics_out.empty()) {
        out << text;
    } else {
        detail::write_file(c.metrics_out, text);
    }
}

inline void cmd_attribute(const RunConfig& c, std::ostream& out, const Log& log)
{
    const auto b = load_bundle(c.bundle);
    const auto t = detail::load_flows(c.flows_csv, "flow file");
    const auto verdicts = detect(b, t.rows);
    json arr = json::array();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (!verdicts[i].malicious) {
            continue;
        }
        const auto x = encode_flow(t.rows[i].features, b.stats);
        const auto r = attribute(b.model, x, t.rows[i].id);
        auto j = to_json(r, b.threshold.t_det);
        json ratio = json::object();
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            ratio[std::string(kFeatureNames[f])] = r.logical[f] * flow_error(r) / b.threshold.t_det;
        }
        j["share_error_over_t_det"] = ratio;
        if (!t.rows[i].category.empty()) {
            j["category"] = t.rows[i].category;
        }
        arr.push_back(std::move(j));
    }
    log.info("attributed " + std::to_string(arr.size()) + " detected flows");
    const std::string text = arr.dump(2) + "\n";
    if (c.out.empty()) {
        out << text;
    } else {
        detail::write_file(c.out, text);
    }
}

inline void cmd_sweep(const RunConfig& c, std::ostream& out, const Log& log)
{
    const auto target = parse_sweep_target(c.target);
    const auto grid = c.grid.empty() ? default_grid(target) : detail::parse_grid(c.grid, target);
    if (grid.empty()) {
        throw InvalidArgument("sweep grid is empty");
    }
    const auto b = load_bundle(c.bundle);
    const auto t = detail::load_flows(c.flows_csv, "flow file");
    const auto verdicts = detect(b, t.rows);
    const auto picks = sample_base_flows(t.rows, verdicts, c.base_flows, c.seed);
    if (picks.empty()) {
        throw Error(c.flows_csv + ": no benign-verdict UDP flows to use as base flows");
    }
    if (picks.size() < c.base_flows) {
        log.warn("only " + std::to_string(picks.size()) + " benign-verdict UDP flows available (asked for "
                 + std::to_string(c.base_flows) + ")");
    }
    std::vector<SweepResult> sweeps;
    sweeps.reserve(picks.size());
    for (auto i : picks) {
        sweeps.push_back(counterfactual_sweep(b, t.rows[i].features, target, grid, t.rows[i].id));
        log.debug("swept base flow " + std::to_string(t.rows[i].id));
    }
    std::ostringstream s;
    write_sweep_csv(s, sweep_summary(sweeps));
    if (c.out.empty()) {
        out << s.str();
    } else {
        detail::write_file(c.out, s.str());
        log.info("swept " + target.name() + " over " + std::to_string(grid.size()) + " values on "
                 + std::to_string(sweeps.size()) + " base flows");
    }
}

/// Markdown summary of one or more detect metrics files.
inline void cmd_report(const RunConfig& c, std::ostream& out, const Log&)
{
    if (c.metrics_in.empty()) {
        throw Error("no metrics files given");
    }
    std::ostringstream s;
    auto num = [](const json& v) -> std::optional<double> {
        return v.is_number() ? std::optional<double>(v.get<double>()) : std::nullopt;
    };
    for (const auto& path : c.metrics_in) {
        auto in = detail::open_input(path, "metrics file");
        json j;
        try {
            j = flowae::detail::parse_document(in, "metrics");
            const json& m = j.at("metrics");
            s << "## " << path << "\n\n";
            s << "| flows | t_det | precision | recall | f1 | TNR | FPR |\n";
            s << "|---:|---:|---:|---:|---:|---:|---:|\n";
            s << "| " << j.at("flows").get<std::uint64_t>() << " | "
              << csv::format_double(j.at("t_det").get<double>()) << " | "
              << detail::fmt(num(m.at("precision"))) << " | " << detail::fmt(num(m.at("recall")))
              << " | " << detail::fmt(num(m.at("f1"))) << " | " << detail::fmt(num(m.at("tnr")))
              << " | " << detail::fmt(num(m.at("fpr"))) << " |\n\n";
            if (j.contains("per_category")) {
                s << "| category | malicious flows | detected | recall |\n";
                s << "|---|---:|---:|---:|\n";
                for (const auto& r : j.at("per_category")) {
                    s << "| " << r.at("category").get<std::string>() << " | "
                      << r.at("total").get<std::uint64_t>() << " | "
                      << r.at("detected").get<std::uint64_t>() << " | "
                      << detail::fmt(r.at("recall").get<double>()) << " |\n";
                }
                s << '\n';
            }
        } catch (const json::exception& e) {
            throw ParseError(path + ": " + e.what());
        }
    }
    if (c.out.empty()) {
        out << s.str();
    } else {
        detail::write_file(c.out, s.str());
    }
}

// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr)
{
    RunConfig c;
    c.hyper = HyperParams{};
    CLI::App app{"Autoencoder-based DDoS flow detection with per-feature explanations", "flowae"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    auto seed = [&](CLI::App* s) { s->add_option("--seed", c.seed, "Root seed")->capture_default_str(); };
    auto hyper = [&](CLI::App* s) {
        s->add_option("--batch", c.hyper.batch_size, "Mini-batch size")->capture_default_str();
        s->add_option("--lr", c.hyper.learning_rate, "Adam learning rate")->capture_default_str();
        s->add_option("--dropout", c.hyper.dropout_ratio, "Dropout ratio")->capture_default_str();
        s->add_option("--decay", c.hyper.weight_decay, "L2 weight decay")->capture_default_str();
        s->add_option("--epochs", c.hyper.epochs, "Training epochs")->capture_default_str();
        s->add_option("--layers", c.layer_dims, "Layer widths, input to output")->delimiter(',');
        s->add_option("--timestamp", c.timestamp, "Training timestamp recorded in the bundle")
            ->envname("FLOWAE_TIMESTAMP");
        s->add_option("--train", c.train_csv, "Benign training flows (CSV)")->required();
        s->add_option("--threshold", c.threshold_csv, "Benign threshold flows (CSV)")->required();
    };

    auto* synth = app.add_subcommand("synth", "Generate train/threshold/validation/test flow CSVs");
    seed(synth);
    synth->add_option("--out-dir", c.out_dir, "Existing output directory")->capture_default_str();
    synth->add_option("--profile", c.profile, "Benign profile file (key = value lines)");
    synth->add_option("--scenario", c.scenarios, "Attack categories for validation/test (default: all)")
        ->check(CLI::IsMember(std::vector<std::string>(kCategoryNames.begin(), kCategoryNames.end())));
    synth->add_option("--train-size", c.sizes.train)->capture_default_str();
    synth->add_option("--threshold-size", c.sizes.threshold)->capture_default_str();
    synth->add_option("--validation-size", c.sizes.validation)->capture_default_str();
    synth->add_option("--test-size", c.sizes.test)->capture_default_str();
    synth->add_option("--noise-rate", c.noise_rate, "Training noise fraction (overrides profile)");
    synth->add_flag("--packets", c.packets, "Also write per-split packet CSVs");

    auto* extract = app.add_subcommand("extract", "Aggregate a packet CSV into flow features");
    extract->add_option("--packets", c.packets_in, "Packet CSV")->required();
    extract->add_option("--out", c.out, "Flow CSV (default: stdout)");
    extract->add_option("--window", c.window, "Flow window in seconds")->capture_default_str();
    extract->add_option("--first-id", c.first_id, "First flow id")->capture_default_str();

    auto* train = app.add_subcommand("train", "Train a model bundle on benign flows");
    seed(train);
    hyper(train);
    train->add_option("--out", c.out, "Bundle path")->required();

    auto* tune = app.add_subcommand("tune", "Validate and, below the 0.99 gate, random-search retrain");
    seed(tune);
    hyper(tune);
    tune->add_option("--validation", c.validation_csv, "Labeled validation flows")->required();
    tune->add_option("--bundle", c.bundle, "Baseline bundle (default: train one)");
    tune->add_option("--trials", c.trials, "Random-search trials")->capture_default_str();
    tune->add_option("--out", c.out, "Output bundle path")->required();

    auto* det = app.add_subcommand("detect", "Score flows; metrics when labels are present");
    det->add_option("--bundle", c.bundle)->required();
    det->add_option("--flows", c.flows_csv)->required();
    det->add_option("--out", c.out, "Verdict CSV (default: stdout)");
    det->add_option("--metrics", c.metrics_out, "Metrics JSON (default: stdout)");

    auto* attr = app.add_subcommand("attribute", "Per-feature attribution for detected flows");
    attr->add_option("--bundle", c.bundle)->required();
    attr->add_option("--flows", c.flows_csv)->required();
    attr->add_option("--out", c.out, "JSON output (default: stdout)");

    auto* sweep = app.add_subcommand("sweep", "Counterfactual sweep over benign base flows");
    seed(sweep);
    sweep->add_option("--bundle", c.bundle)->required();
    sweep->add_option("--flows", c.flows_csv, "Flows to draw base flows from")->required();
    sweep->add_option("--target", c.target, "dst_port, src_port, protocol, size_pair or a feature name")
        ->required();
    sweep->add_option("--grid", c.grid, "Values: a,b,c or lo:hi:step; size_pair takes max:min,...");
    sweep->add_option("--base-flows", c.base_flows)->capture_default_str();
    sweep->add_option("--out", c.out, "Summary CSV (default: stdout)");

    auto* report = app.add_subcommand("report", "Markdown tables from detect metrics files");
    report->add_option("metrics", c.metrics_in, "Metrics JSON files")->required();
    report->add_option("--out", c.out, "Markdown output (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        for (auto* s : app.get_subcommands()) {
            err << "usage: see `flowae " << s->get_name() << " --help`\n";
        }
        return kExitUsage;
    }

    const Log log(err, log_level_from_env());
    try {
        if (synth->parsed()) {
            cmd_synth(c, out, log);
        } else if (extract->parsed()) {
            cmd_extract(c, out, log);
        } else if (train->parsed()) {
            cmd_train(c, out, log);
        } else if (tune->parsed()) {
            cmd_tune(c, out, log);
        } else if (det->parsed()) {
            cmd_detect(c, out, log);
        } else if (attr->parsed()) {
            cmd_attribute(c, out, log);
        } else if (sweep->parsed()) {
            cmd_sweep(c, out, log);
        } else if (report->parsed()) {
            cmd_report(c, out, log);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

} // namespace flowae::cli

#endif
