#include "idalc/report.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "idalc/error.hpp"

namespace idalc {
namespace {

using nlohmann::json;

constexpr std::string_view kMissing = "–";

std::string pct(double fraction) { return format_fixed2(100.0 * fraction); }

std::string row(const std::vector<std::string>& cells) {
  return fmt::format("| {} |\n", fmt::join(cells, " | "));
}

std::string header(const std::vector<std::string>& cells) {
  std::string out = row(cells);
  out += "|";
  for (std::size_t i = 0; i < cells.size(); ++i) out += "---|";
  out += "\n";
  return out;
}

json metrics_to_json(const Metrics& m) {
  json per_class = json::array();
  for (const auto& c : m.per_class) {
    per_class.push_back({{"label", c.label},
                         {"precision", c.precision},
                         {"recall", c.recall},
                         {"f1", c.f1},
                         {"support", c.support}});
  }
  return {{"phase", m.phase},
          {"cycle", m.cycle},
          {"accuracy", m.accuracy},
          {"macro_f1", m.macro_f1},
          {"per_class", per_class}};
}

Metrics metrics_from_json(const json& j) {
  Metrics m;
  j.at("phase").get_to(m.phase);
  j.at("cycle").get_to(m.cycle);
  j.at("accuracy").get_to(m.accuracy);
  j.at("macro_f1").get_to(m.macro_f1);
  for (const auto& c : j.at("per_class")) {
    ClassMetrics cm;
    c.at("label").get_to(cm.label);
    c.at("precision").get_to(cm.precision);
    c.at("recall").get_to(cm.recall);
    c.at("f1").get_to(cm.f1);
    c.at("support").get_to(cm.support);
    m.per_class.push_back(std::move(cm));
  }
  return m;
}

std::string quorum_label(const std::optional<std::size_t>& quorum) {
  return quorum ? fmt::format("MV(>={})", *quorum) : std::string("No MV");
}

const Metrics& final_phase(const RunReport& r) {
  if (r.phases.empty()) throw Error("report has no phases");
  return r.phases.back();
}

std::string metric_cell(const Metrics* m, bool f1) {
  if (!m) return std::string(kMissing);
  return pct(f1 ? m->macro_f1 : m->accuracy);
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  throw ConfigError(fmt::format("unknown report format '{}'", name));
}

std::string format_fixed2(double value) {
  auto s = fmt::format("{:.2f}", value);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string report_to_json(const RunReport& r) {
  json phases = json::array();
  for (const auto& m : r.phases) phases.push_back(metrics_to_json(m));
  json corrections = json::array();
  for (const auto& c : r.corrections) {
    corrections.push_back({{"cycle", c.cycle},
                           {"threshold", c.threshold},
                           {"below_threshold", c.below_threshold},
                           {"auto_corrected", c.auto_corrected},
                           {"rejected", c.rejected},
                           {"auto_correct_hits", c.auto_correct_hits},
                           {"auto_correct_fraction", c.auto_correct_fraction()},
                           {"auto_correct_accuracy", c.auto_correct_accuracy()},
                           {"early_stop", c.early_stop}});
  }
  const auto& e = r.ood.evaluation;
  json doc = {
      {"schema_version", r.schema_version},
      {"dataset", r.dataset},
      {"config", r.config},
      {"split",
       {{"known", r.split.known},
        {"novel", r.split.novel},
        {"labeled", r.split.labeled},
        {"unlabeled", r.split.unlabeled},
        {"unlabeled_novel", r.split.unlabeled_novel},
        {"test", r.split.test},
        {"test_novel", r.split.test_novel},
        {"total", r.split.total()}}},
      {"phases", phases},
      {"ood",
       {{"detector", r.ood.detector},
        {"flagged", r.ood.flagged},
        {"remainder", r.ood.remainder},
        {"accuracy", e.accuracy},
        {"macro_f1", e.macro_f1},
        {"true_ood", e.true_ood},
        {"false_ood", e.false_ood},
        {"true_in_domain", e.true_in_domain},
        {"missed_ood", e.missed_ood},
        {"novel_recall", e.novel_recall()},
        {"false_flag_rate", e.false_flag_rate()}}},
      {"labeling",
       {{"strategy", r.labeling.strategy},
        {"flagged", r.labeling.flagged},
        {"seed_size", r.labeling.seed_size},
        {"discovered_labels", r.labeling.discovered_labels},
        {"clusters", r.labeling.clusters},
        {"accuracy", r.labeling.accuracy},
        {"warnings", r.labeling.warnings}}},
      {"corrections", corrections},
      {"configured_cycles", r.configured_cycles},
      {"quorum", r.quorum ? json(*r.quorum) : json(nullptr)},
      {"ledger",
       {{"id", r.ledger.id_calls},
        {"alc", r.ledger.alc_calls},
        {"total", r.ledger.total()},
        {"unlabeled", r.ledger.unlabeled_size},
        {"percentage", r.ledger.percentage()}}},
  };
  return doc.dump(2) + "\n";
}

RunReport report_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(fmt::format("report: invalid JSON: {}", e.what()));
  }
  try {
    RunReport r;
    j.at("schema_version").get_to(r.schema_version);
    if (r.schema_version != kReportSchemaVersion) {
      throw DataError(fmt::format("report: unsupported schema_version {}", r.schema_version));
    }
    j.at("dataset").get_to(r.dataset);
    j.at("config").get_to(r.config);
    const auto& s = j.at("split");
    s.at("known").get_to(r.split.known);
    s.at("novel").get_to(r.split.novel);
    s.at("labeled").get_to(r.split.labeled);
    s.at("unlabeled").get_to(r.split.unlabeled);
    s.at("unlabeled_novel").get_to(r.split.unlabeled_novel);
    s.at("test").get_to(r.split.test);
    s.at("test_novel").get_to(r.split.test_novel);
    for (const auto& m : j.at("phases")) r.phases.push_back(metrics_from_json(m));
    const auto& o = j.at("ood");
    o.at("detector").get_to(r.ood.detector);
    o.at("flagged").get_to(r.ood.flagged);
    o.at("remainder").get_to(r.ood.remainder);
    o.at("accuracy").get_to(r.ood.evaluation.accuracy);
    o.at("macro_f1").get_to(r.ood.evaluation.macro_f1);
    o.at("true_ood").get_to(r.ood.evaluation.true_ood);
    o.at("false_ood").get_to(r.ood.evaluation.false_ood);
    o.at("true_in_domain").get_to(r.ood.evaluation.true_in_domain);
    o.at("missed_ood").get_to(r.ood.evaluation.missed_ood);
    const auto& l = j.at("labeling");
    l.at("strategy").get_to(r.labeling.strategy);
    l.at("flagged").get_to(r.labeling.flagged);
    l.at("seed_size").get_to(r.labeling.seed_size);
    l.at("discovered_labels").get_to(r.labeling.discovered_labels);
    l.at("clusters").get_to(r.labeling.clusters);
    l.at("accuracy").get_to(r.labeling.accuracy);
    l.at("warnings").get_to(r.labeling.warnings);
    for (const auto& c : j.at("corrections")) {
      CorrectionSummary cs;
      c.at("cycle").get_to(cs.cycle);
      c.at("threshold").get_to(cs.threshold);
      c.at("below_threshold").get_to(cs.below_threshold);
      c.at("auto_corrected").get_to(cs.auto_corrected);
      c.at("rejected").get_to(cs.rejected);
      c.at("auto_correct_hits").get_to(cs.auto_correct_hits);
      c.at("early_stop").get_to(cs.early_stop);
      r.corrections.push_back(cs);
    }
    j.at("configured_cycles").get_to(r.configured_cycles);
    if (!j.at("quorum").is_null()) r.quorum = j.at("quorum").get<std::size_t>();
    const auto& led = j.at("ledger");
    led.at("id").get_to(r.ledger.id_calls);
    led.at("alc").get_to(r.ledger.alc_calls);
    led.at("unlabeled").get_to(r.ledger.unlabeled_size);
    return r;
  } catch (const json::exception& e) {
    throw DataError(fmt::format("report: malformed document: {}", e.what()));
  }
}

std::string render_split(const std::string& dataset, const SplitSummary& split) {
  std::string out = header({"Dataset", "Known", "Novel", "Labeled", "Unlabeled",
                            "Unlabeled OOD", "Test", "Test OOD", "Total"});
  out += row({dataset, std::to_string(split.known.size()), std::to_string(split.novel.size()),
              std::to_string(split.labeled), std::to_string(split.unlabeled),
              std::to_string(split.unlabeled_novel), std::to_string(split.test),
              std::to_string(split.test_novel), std::to_string(split.total())});
  out += fmt::format("\nKnown: {}. Novel: {}.\n", fmt::join(split.known, ", "),
                     split.novel.empty() ? std::string("none")
                                         : fmt::format("{}", fmt::join(split.novel, ", ")));
  return out;
}

std::string render_markdown(const RunReport& r) {
  const std::string name = r.dataset.empty() ? "dataset" : r.dataset;
  std::string out = fmt::format("# IDALC report: {}\n\n", name);

  out += "## Dataset split\n\n";
  out += render_split(name, r.split);
  out += "\n";

  const auto& e = r.ood.evaluation;
  out += "## OOD detection\n\n";
  out += header({"Detector", "Flagged", "Acc", "F1", "Novel recall", "False-flag rate"});
  out += row({r.ood.detector, std::to_string(r.ood.flagged), pct(e.accuracy), pct(e.macro_f1),
              pct(e.novel_recall()), pct(e.false_flag_rate())});
  out += "\n";

  out += "## Labeling\n\n";
  out += header({"Strategy", "Flagged", "Seed", "Discovered labels", "Clusters", "Label acc"});
  out += row({r.labeling.strategy, std::to_string(r.labeling.flagged),
              std::to_string(r.labeling.seed_size), std::to_string(r.labeling.discovered_labels),
              std::to_string(r.labeling.clusters), pct(r.labeling.accuracy)});
  for (const auto& w : r.labeling.warnings) out += fmt::format("\nWarning: {}\n", w);
  out += "\n";

  out += "## Accuracy and macro-F1 by phase\n\n";
  std::vector<std::string> cols = {"Strategy"};
  std::vector<std::string> tags = {"ID(0)", "ID(1)"};
  for (std::size_t k = 1; k <= r.configured_cycles; ++k) tags.push_back(fmt::format("ALC({})", k));
  for (const auto& t : tags) {
    cols.push_back(t + " Acc");
    cols.push_back(t + " F1");
  }
  out += header(cols);
  std::vector<std::string> cells = {r.labeling.strategy};
  for (const auto& t : tags) {
    const auto* m = r.phase(t);
    cells.push_back(metric_cell(m, false));
    cells.push_back(metric_cell(m, true));
  }
  out += row(cells);
  out += "\n";

  if (!r.phases.empty()) {
    const auto& last = final_phase(r);
    out += fmt::format("## Per-class results ({})\n\n", last.phase);
    out += header({"Intent", "P", "R", "F1", "Support"});
    for (const auto& c : last.per_class) {
      out += row({c.label, pct(c.precision), pct(c.recall), pct(c.f1), std::to_string(c.support)});
    }
    out += "\n";
  }

  out += fmt::format("## Low-confidence corrections ({})\n\n", quorum_label(r.quorum));
  out += header({"Cycle", "Threshold", "Below threshold", "Auto-corrected", "Rejected",
                 "Auto-correct %", "Auto-correct acc"});
  for (std::size_t k = 1; k <= r.configured_cycles; ++k) {
    const CorrectionSummary* c = nullptr;
    for (const auto& cs : r.corrections) {
      if (cs.cycle == k) c = &cs;
    }
    if (!c) {
      out += row({std::to_string(k), std::string(kMissing), std::string(kMissing),
                  std::string(kMissing), std::string(kMissing), std::string(kMissing),
                  std::string(kMissing)});
      continue;
    }
    out += row({std::to_string(k), format_fixed2(c->threshold), std::to_string(c->below_threshold),
                std::to_string(c->auto_corrected), std::to_string(c->rejected),
                pct(c->auto_correct_fraction()),
                c->auto_corrected ? pct(c->auto_correct_accuracy()) : std::string(kMissing)});
  }
  out += "\n";

  out += "## Annotation cost\n\n";
  out += header({"Dataset", "#ID", "#ALC", "#Total", "#Unlabeled", "%"});
  out += row({name, std::to_string(r.ledger.id_calls), std::to_string(r.ledger.alc_calls),
              std::to_string(r.ledger.total()), std::to_string(r.ledger.unlabeled_size),
              format_fixed2(r.ledger.percentage())});
  return out;
}

std::string render_report(const RunReport& report, ReportFormat format) {
  return format == ReportFormat::kJson ? report_to_json(report) : render_markdown(report);
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "detector") return SweepAxis::kDetector;
  if (name == "strategy") return SweepAxis::kStrategy;
  if (name == "quorum") return SweepAxis::kQuorum;
  throw ConfigError(fmt::format("unknown sweep axis '{}'", name));
}

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kDetector: return "detector";
    case SweepAxis::kStrategy: return "strategy";
    case SweepAxis::kQuorum: return "quorum";
  }
  return "?";
}

std::string render_sweep(SweepAxis axis, const std::vector<SweepCell>& cells) {
  std::string out = fmt::format("# Sweep over {}\n\n", sweep_axis_name(axis));
  switch (axis) {
    case SweepAxis::kDetector:
      out += header({"Detector", "Flagged", "Acc", "F1", "Novel recall", "False-flag rate"});
      for (const auto& c : cells) {
        const auto& e = c.report.ood.evaluation;
        out += row({c.label, std::to_string(c.report.ood.flagged), pct(e.accuracy),
                    pct(e.macro_f1), pct(e.novel_recall()), pct(e.false_flag_rate())});
      }
      break;
    case SweepAxis::kStrategy:
      out += header({"Strategy", "ID(0) Acc", "ID(0) F1", "ID(1) Acc", "ID(1) F1", "Final phase",
                     "Final Acc", "Final F1", "% annotated"});
      for (const auto& c : cells) {
        const auto& r = c.report;
        const auto& last = final_phase(r);
        out += row({c.label, metric_cell(r.phase("ID(0)"), false),
                    metric_cell(r.phase("ID(0)"), true), metric_cell(r.phase("ID(1)"), false),
                    metric_cell(r.phase("ID(1)"), true), last.phase, pct(last.accuracy),
                    pct(last.macro_f1), format_fixed2(r.ledger.percentage())});
      }
      break;
    case SweepAxis::kQuorum:
      out += header({"Condition", "#ALC", "#Total", "ALC %", "Total %", "Final Acc"});
      for (const auto& c : cells) {
        const auto& r = c.report;
        out += row({c.label, std::to_string(r.ledger.alc_calls), std::to_string(r.ledger.total()),
                    format_fixed2(annotation_percentage(r.ledger.alc_calls, r.ledger.unlabeled_size)),
                    format_fixed2(r.ledger.percentage()), pct(final_phase(r).accuracy)});
      }
      break;
  }
  return out;
}

}  // namespace idalc
