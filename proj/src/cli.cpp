#include "idalc/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "idalc/config.hpp"
#include "idalc/error.hpp"
#include "idalc/pipeline.hpp"
#include "idalc/report.hpp"

namespace idalc {
namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& contents) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot write '{}'", path.string()));
  f << contents;
  if (!f) throw Error(fmt::format("short write to '{}'", path.string()));
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_report(const fs::path& dir, const RunReport& report) {
  write_file(dir / "report.json", report_to_json(report));
  write_file(dir / "report.md", render_markdown(report));
}

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  std::string axis;
  std::string report;
  std::string format = "markdown";
};

int do_inspect(const Options& o, std::ostream& out) {
  const auto config = load_config(o.config, o.sets);
  const auto corpus = load_dataset(config.dataset);
  const auto split = inspect_split(corpus, config);
  out << render_split(config.dataset.name.empty() ? "dataset" : config.dataset.name, split);
  out << "\nIntents in corpus:\n";
  for (const auto& [label, count] : corpus.label_counts()) {
    out << fmt::format("  {:<24} {}\n", label, count);
  }
  return kExitOk;
}

int do_run(const Options& o, std::ostream& out) {
  const auto config = load_config(o.config, o.sets);
  const auto report = run_idalc(config);
  write_report(o.out, report);
  const auto& last = report.phases.back();
  out << fmt::format("{}: accuracy {}, macro-F1 {}; annotated {} of {} ({}%)\n", last.phase,
                     format_fixed2(100.0 * last.accuracy), format_fixed2(100.0 * last.macro_f1),
                     report.ledger.total(), report.ledger.unlabeled_size,
                     format_fixed2(report.ledger.percentage()));
  out << fmt::format("wrote {}\n", (fs::path(o.out) / "report.json").string());
  return kExitOk;
}

int do_sweep(const Options& o, std::ostream& out) {
  const auto axis = parse_sweep_axis(o.axis);
  // Parse once up front so config errors surface before any run.
  const auto base = load_config(o.config, o.sets);
  const auto corpus = load_dataset(base.dataset);

  struct Cell {
    std::string label;
    std::string dir;
    std::string setting;
  };
  std::vector<Cell> plan;
  switch (axis) {
    case SweepAxis::kDetector:
      for (const char* d : {"msp", "doc", "lof"}) {
        plan.push_back({d, d, fmt::format("detector.kind={}", d)});
      }
      break;
    case SweepAxis::kStrategy:
      for (const char* s : {"km", "mv", "cl"}) {
        plan.push_back({s, s, fmt::format("labeling.strategy={}", s)});
      }
      break;
    case SweepAxis::kQuorum:
      plan.push_back({"No MV", "quorum-none", "alc.quorum=none"});
      for (int q : {3, 4, 5}) {
        plan.push_back({fmt::format("MV(>={})", q), fmt::format("quorum-{}", q),
                        fmt::format("alc.quorum={}", q)});
      }
      break;
  }

  std::string extra;
  std::vector<SweepCell> cells;
  for (const auto& cell : plan) {
    auto sets = o.sets;
    sets.push_back(cell.setting);
    auto config = load_config(o.config, sets);
    if (axis == SweepAxis::kDetector && config.detector.kind == DetectorKind::kMsp) {
      const auto selection = select_msp_threshold(corpus, config);
      config.detector.msp_threshold = selection.best;
      extra += fmt::format("\n## MSP threshold selection ({} validation samples)\n\n",
                           selection.carve_out);
      extra += "| Threshold | OOD F1 |\n|---|---|\n";
      for (std::size_t i = 0; i < selection.thresholds.size(); ++i) {
        extra += fmt::format("| {:.1f} | {} |\n", selection.thresholds[i],
                             format_fixed2(100.0 * selection.macro_f1[i]));
      }
      extra += fmt::format("\nBest threshold: {:.1f}\n", selection.best);
    }
    out << fmt::format("running {} ...\n", cell.label);
    auto report = run_idalc(corpus, config);
    write_report(fs::path(o.out) / cell.dir, report);
    cells.push_back({cell.label, std::move(report)});
  }
  const auto table = render_sweep(axis, cells) + extra;
  const auto path = fs::path(o.out) / fmt::format("sweep_{}.md", sweep_axis_name(axis));
  write_file(path, table);
  out << table << fmt::format("\nwrote {}\n", path.string());
  return kExitOk;
}

int do_render(const Options& o, std::ostream& out) {
  const auto report = report_from_json(read_file(o.report));
  const auto format = parse_report_format(o.format);
  const auto doc = render_report(report, format);
  if (o.out.empty()) {
    out << doc;
  } else {
    const auto path =
        fs::path(o.out) / (format == ReportFormat::kJson ? "report.json" : "report.md");
    write_file(path, doc);
    out << fmt::format("wrote {}\n", path.string());
  }
  return kExitOk;
}

}  // namespace

void configure_logging() {
  static const auto logger = [] {
    auto l = spdlog::stderr_logger_mt("idalc");
    spdlog::set_default_logger(l);
    return l;
  }();
  (void)logger;
  const char* env = std::getenv("IDALC_LOG");
  const std::string level = env ? env : "warn";
  if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else {
    spdlog::set_level(spdlog::level::warn);
  }
}

int cli_run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  configure_logging();
  CLI::App app{"Intent detection with active learning correction", "idalc"};
  app.require_subcommand(1);
  Options o;

  auto* inspect = app.add_subcommand("inspect", "Print split statistics");
  inspect->add_option("--config", o.config, "Run config file")->required();
  inspect->add_option("--set", o.sets, "Override, section.key=value");

  auto* run = app.add_subcommand("run", "Run the full loop and write reports");
  run->add_option("--config", o.config, "Run config file")->required();
  run->add_option("--out", o.out, "Output directory")->required();
  run->add_option("--set", o.sets, "Override, section.key=value");

  auto* sweep = app.add_subcommand("sweep", "Vary one axis and compare runs");
  sweep->add_option("--config", o.config, "Run config file")->required();
  sweep->add_option("--out", o.out, "Output directory")->required();
  sweep->add_option("--axis", o.axis, "detector, strategy or quorum")
      ->required()
      ->check(CLI::IsMember({"detector", "strategy", "quorum"}));
  sweep->add_option("--set", o.sets, "Override, section.key=value");

  auto* render = app.add_subcommand("render", "Re-render a stored JSON report");
  render->add_option("report", o.report, "report.json")->required();
  render->add_option("--out", o.out, "Output directory (default: stdout)");
  render->add_option("--format", o.format, "markdown or json")
      ->check(CLI::IsMember({"markdown", "md", "json"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (inspect->parsed()) return do_inspect(o, out);
    if (run->parsed()) return do_run(o, out);
    if (sweep->parsed()) return do_sweep(o, out);
    return do_render(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace idalc
