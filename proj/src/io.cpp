#include "climd/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <system_error>

#include "climd/error.hpp"
#include "climd/format.hpp"
#include "json.hpp"

namespace climd {
namespace {

using nlohmann::json;

[[noreturn]] void fail_at(std::string_view source, std::size_t line, const std::string& what) {
  throw ValidationError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

// Runs `fn`, re-raising validation errors with the source position.
template <class Fn>
auto at_line(std::string_view source, std::size_t line, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    fail_at(source, line, e.what());
  }
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

std::vector<double> json_numbers(const json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError(std::string(what) + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void check_embedding(std::span<const double> e) {
  if (e.empty()) throw ValidationError("embedding is empty");
  double ss = 0.0;
  for (double v : e) {
    if (!std::isfinite(v)) throw ValidationError("embedding has a non-finite entry");
    ss += v * v;
  }
  if (!(ss > 0.0)) throw ValidationError("embedding has zero norm");
}

std::string join_doubles(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

}  // namespace

// --- format.hpp -----------------------------------------------------------

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw ValidationError("cannot format number");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ValidationError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::size_t parse_size(std::string_view text) {
  text = trim(text);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ValidationError("not a non-negative integer: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

// --- io.hpp ---------------------------------------------------------------

void validate_sample_id(std::string_view id) {
  if (id.empty()) throw ValidationError("empty sample_id");
  for (char c : id) {
    if (c == ',' || c == '"' || c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      throw ValidationError("sample_id '" + std::string(id) + "' contains a forbidden character");
    }
  }
}

void write_traces(std::ostream& out, std::span<const SampleTrace> traces) {
  for (const auto& t : traces) {
    json mods = json::array();
    for (const auto& m : t.modalities) mods.push_back({{"probs", m.probs}, {"embedding", m.embedding}});
    nlohmann::ordered_json rec;
    rec["sample_id"] = t.sample_id;
    rec["label"] = t.label;
    rec["modalities"] = std::move(mods);
    out << rec.dump() << '\n';
  }
}

std::vector<SampleTrace> read_traces(std::istream& in, std::string_view source) {
  std::vector<SampleTrace> traces;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    traces.push_back(at_line(source, lineno, [&] {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
      }
      if (!j.is_object()) throw ValidationError("record is not an object");
      if (!j.contains("sample_id") || !j["sample_id"].is_string()) {
        throw ValidationError("missing string field sample_id");
      }
      if (!j.contains("label") || !j["label"].is_number_integer() || j["label"].get<long long>() < 0) {
        throw ValidationError("missing non-negative integer field label");
      }
      if (!j.contains("modalities") || !j["modalities"].is_array()) {
        throw ValidationError("missing array field modalities");
      }
      SampleTrace t;
      t.sample_id = j["sample_id"].get<std::string>();
      validate_sample_id(t.sample_id);
      t.label = j["label"].get<std::size_t>();
      for (const auto& m : j["modalities"]) {
        if (!m.is_object() || !m.contains("probs") || !m.contains("embedding")) {
          throw ValidationError("modality needs probs and embedding");
        }
        ModalityOutput out;
        out.probs = json_numbers(m["probs"], "probs");
        out.embedding = json_numbers(m["embedding"], "embedding");
        validate_probabilities(out.probs);
        check_embedding(out.embedding);
        t.modalities.push_back(std::move(out));
      }
      validate_trace(t);
      return t;
    }));
  }
  if (in.bad()) throw IoError(std::string("read failure in ") + std::string(source));
  return traces;
}

void write_difficulty_table(std::ostream& out, const DifficultyTable& table) {
  const std::size_t m = table.empty() ? 0 : table.front().psi.size();
  out << "sample_id,label,phi";
  for (std::size_t i = 1; i <= m; ++i) out << ",psi_" << i;
  out << ",r\n";
  for (const auto& rec : table) {
    if (rec.psi.size() != m) throw ValidationError("difficulty records differ in modality count");
    out << rec.sample_id << ',' << rec.label << ',' << format_double(rec.phi) << ','
        << join_doubles(rec.psi) << ',' << format_double(rec.r) << '\n';
  }
}

DifficultyTable read_difficulty_table(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t modalities = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const auto cols = split(trim(line), ',');
    if (cols.size() < 6 || cols[0] != "sample_id" || cols[1] != "label" || cols[2] != "phi" ||
        cols.back() != "r") {
      fail_at(source, lineno, "expected header sample_id,label,phi,psi_1..psi_M,r");
    }
    modalities = cols.size() - 4;
    for (std::size_t i = 0; i < modalities; ++i) {
      if (cols[3 + i] != "psi_" + std::to_string(i + 1)) fail_at(source, lineno, "bad psi column name");
    }
    break;
  }
  if (modalities == 0) fail_at(source, lineno, "missing header");
  DifficultyTable table;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    table.push_back(at_line(source, lineno, [&] {
      const auto cols = split(trim(line), ',');
      if (cols.size() != modalities + 4) throw ValidationError("wrong number of columns");
      DifficultyRecord rec;
      rec.sample_id = std::string(cols[0]);
      validate_sample_id(rec.sample_id);
      rec.label = parse_size(cols[1]);
      rec.phi = parse_double(cols[2]);
      for (std::size_t i = 0; i < modalities; ++i) rec.psi.push_back(parse_double(cols[3 + i]));
      rec.r = parse_double(cols.back());
      if (!std::isfinite(rec.r)) throw ValidationError("non-finite difficulty");
      return rec;
    }));
  }
  return table;
}

std::vector<LabeledSample> read_labels(std::istream& in, std::string_view source) {
  std::vector<LabeledSample> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const auto cols = split(trim(line), ',');
    if (first && cols.size() == 2 && trim(cols[0]) == "sample_id") {
      first = false;
      continue;
    }
    first = false;
    rows.push_back(at_line(source, lineno, [&] {
      if (cols.size() != 2) throw ValidationError("expected sample_id,label");
      LabeledSample s{std::string(trim(cols[0])), parse_size(cols[1])};
      validate_sample_id(s.sample_id);
      return s;
    }));
  }
  return rows;
}

std::vector<Prediction> read_predictions(std::istream& in, std::string_view source) {
  std::vector<Prediction> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const auto cols = split(trim(line), ',');
    if (first && cols.size() == 3 && trim(cols[0]) == "sample_id") {
      first = false;
      continue;
    }
    first = false;
    rows.push_back(at_line(source, lineno, [&] {
      if (cols.size() != 3) throw ValidationError("expected sample_id,true,pred");
      Prediction p{std::string(trim(cols[0])), parse_size(cols[1]), parse_size(cols[2])};
      validate_sample_id(p.sample_id);
      return p;
    }));
  }
  return rows;
}

void write_predictions(std::ostream& out, std::span<const Prediction> predictions) {
  out << "sample_id,true,pred\n";
  for (const auto& p : predictions) out << p.sample_id << ',' << p.truth << ',' << p.predicted << '\n';
}

void write_distribution_report(std::ostream& out, const ClassDistribution& dist) {
  out << "# climd class distribution\n";
  out << "# classes=" << dist.classes() << '\n';
  out << "# samples=" << dist.total() << '\n';
  out << "# gamma=" << format_double(dist.gamma) << '\n';
  out << "# n_min=" << dist.n_min << '\n';
  out << "# alpha_hat=" << (dist.alpha_hat ? format_double(*dist.alpha_hat) : "degenerate-balanced")
      << '\n';
  out << "# alpha_cap=" << format_double(dist.alpha_cap) << '\n';
  out << "class_id,count,rank\n";
  for (std::size_t c = 0; c < dist.classes(); ++c) {
    out << c << ',' << dist.counts[c] << ',' << dist.rank_of_class[c] << '\n';
  }
}

ClassDistribution read_distribution_report(std::istream& in, std::string_view source) {
  std::map<std::string, std::string, std::less<>> meta;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> ranks;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const auto body = trim(text.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        meta[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
      }
      continue;
    }
    if (!header_seen) {
      if (text != "class_id,count,rank") fail_at(source, lineno, "expected header class_id,count,rank");
      header_seen = true;
      continue;
    }
    at_line(source, lineno, [&] {
      const auto cols = split(text, ',');
      if (cols.size() != 3) throw ValidationError("expected class_id,count,rank");
      if (parse_size(cols[0]) != counts.size()) throw ValidationError("class ids must be 0..C-1 in order");
      counts.push_back(parse_size(cols[1]));
      ranks.push_back(parse_size(cols[2]));
      return 0;
    });
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) throw ValidationError(std::string("missing '# ") + key + "=' line");
    return it->second;
  };
  const double gamma = at_line(source, lineno, [&] { return parse_double(need("gamma")); });
  const double alpha_cap = at_line(source, lineno, [&] { return parse_double(need("alpha_cap")); });
  const std::string alpha_hat_text = at_line(source, lineno, [&] { return need("alpha_hat"); });
  ClassDistribution dist =
      at_line(source, lineno, [&] { return distribution_with_alpha(counts, gamma, alpha_cap); });
  if (alpha_hat_text == "degenerate-balanced") {
    dist.alpha_hat.reset();
  } else {
    dist.alpha_hat = at_line(source, lineno, [&] { return parse_double(alpha_hat_text); });
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (ranks[c] != dist.rank_of_class[c]) {
      fail_at(source, lineno, "rank column disagrees with descending-count ranking for class " +
                                  std::to_string(c));
    }
  }
  return dist;
}

std::string distribution_summary(const ClassDistribution& dist) {
  std::ostringstream s;
  s << "classes: " << dist.classes() << ", samples: " << dist.total() << ", n_min: " << dist.n_min
    << ", gamma: " << format_double(dist.gamma) << '\n';
  if (dist.alpha_hat) {
    s << "fitted alpha_hat: " << format_double(*dist.alpha_hat)
      << " (gamma * alpha_hat = " << format_double(dist.gamma * *dist.alpha_hat) << ")\n";
  } else {
    s << "all classes have equal size (degenerate-balanced); using alpha(T) = "
      << format_double(dist.alpha_cap) << '\n';
  }
  s << "rank  class  count\n";
  for (std::size_t r = 1; r <= dist.classes(); ++r) {
    s << r << "     " << dist.class_of_rank[r - 1] << "      " << dist.count_at_rank(r) << '\n';
  }
  return s.str();
}

void write_schedule(std::ostream& out, const Schedule& schedule) {
  out << "epoch,class_id,rank,s_t,sample_ids...\n";
  for (const auto& plan : schedule.epochs) {
    for (std::size_t r = 1; r <= plan.counts.size(); ++r) {
      out << plan.epoch << ',' << schedule.class_of_rank[r - 1] << ',' << r << ',' << plan.counts[r - 1];
      for (const auto& id : plan.class_slice(r)) out << ',' << id;
      out << '\n';
    }
  }
}

void write_schedule_summary(std::ostream& out, const Schedule& schedule) {
  const std::size_t c = schedule.class_of_rank.size();
  out << "epoch";
  for (std::size_t r = 1; r <= c; ++r) out << ",rank_" << r;
  out << '\n';
  for (const auto& plan : schedule.epochs) {
    out << plan.epoch;
    for (std::size_t n : plan.counts) out << ',' << n;
    out << '\n';
  }
}

void write_schedule_targets(std::ostream& out, const Schedule& schedule) {
  const std::size_t c = schedule.class_of_rank.size();
  out << "epoch,alpha_t,s_t";
  for (std::size_t r = 1; r <= c; ++r) out << ",q_" << r;
  out << '\n';
  for (const auto& plan : schedule.epochs) {
    out << plan.epoch << ',' << format_double(plan.alpha) << ',' << plan.total() << ','
        << join_doubles(plan.q) << '\n';
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  if (in.bad()) throw IoError("read failure in " + path.string());
  return s.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failure in " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace climd
