#include "ptalign/io.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include "json.hpp"
#include <sstream>

#include "ptalign/errors.hpp"

namespace ptalign {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

void collect_pnml(const pt::ptree& node, StochasticWorkflowNet::Builder& builder,
                  std::size_t& places) {
  for (const auto& [tag, child] : node) {
    if (tag == "page" || tag == "net") {
      collect_pnml(child, builder, places);
    } else if (tag == "place") {
      auto id = child.get_optional<std::string>("<xmlattr>.id");
      if (!id) throw ParseError("PNML place without id");
      builder.place(*id);
      ++places;
    } else if (tag == "transition") {
      auto id = child.get_optional<std::string>("<xmlattr>.id");
      if (!id) throw ParseError("PNML transition without id");
      std::string name = trim(child.get<std::string>("name.text", ""));
      double weight = 1.0;
      bool invisible = false;
      for (const auto& [ttag, tool] : child) {
        if (ttag != "toolspecific") continue;
        if (tool.get<std::string>("<xmlattr>.activity", "") == "$invisible$") invisible = true;
        for (const auto& [ptag, prop] : tool) {
          if (ptag == "property" && prop.get<std::string>("<xmlattr>.key", "") == "weight") {
            const std::string text = trim(prop.data());
            double w = 0.0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), w);
            if (ec != std::errc() || ptr != text.data() + text.size()) {
              throw ParseError("transition '" + *id + "': bad weight '" + text + "'");
            }
            if (!(w > 0.0)) {
              throw ParseError("transition '" + *id + "': weight must be positive, got " + text);
            }
            weight = w;
          }
        }
      }
      Label label = (invisible || name.empty()) ? Label::tau() : Label::task(name);
      builder.transition(*id, label, weight);
    } else if (tag == "arc") {
      auto src = child.get_optional<std::string>("<xmlattr>.source");
      auto dst = child.get_optional<std::string>("<xmlattr>.target");
      if (!src || !dst) throw ParseError("PNML arc without source/target");
      builder.arc(*src, *dst);
    }
  }
}

double parse_decimal(std::string_view tok, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("line " + std::to_string(line) + ": bad probability '" + std::string(tok) + "'");
  }
  return value;
}

}  // namespace

StochasticWorkflowNet parse_pnml(std::string_view xml) {
  pt::ptree tree;
  std::istringstream in{std::string(xml)};
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed PNML at line " + std::to_string(e.line()) + ": " + e.message());
  }
  auto pnml = tree.get_child_optional("pnml");
  if (!pnml) throw ParseError("missing <pnml> root element");
  StochasticWorkflowNet::Builder builder;
  std::size_t places = 0;
  collect_pnml(*pnml, builder, places);
  if (places == 0) throw ParseError("PNML document contains no places");
  try {
    return builder.build();
  } catch (const StructuralError& e) {
    throw ParseError(std::string("invalid PNML net: ") + e.what());
  }
}

TransitionGraph parse_tg(std::string_view text) {
  std::map<std::string, std::size_t> ids;
  std::vector<Label> labels;
  std::vector<std::tuple<std::string, std::string, double, std::size_t>> edges;
  std::optional<std::string> start, end;

  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<std::string> tok;
    for (std::string t; tokens >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (tok.size() == 2 && (tok[0] == "start" || tok[0] == "end")) {
      auto& slot = tok[0] == "start" ? start : end;
      if (slot) throw ParseError(where + "duplicate '" + tok[0] + "' header");
      slot = tok[1];
    } else if (tok.size() == 2) {
      if (!ids.emplace(tok[0], labels.size()).second) {
        throw ParseError(where + "node '" + tok[0] + "' declared twice");
      }
      labels.push_back(tok[1] == "tau" ? Label::tau() : Label::task(tok[1]));
    } else if (tok.size() == 3) {
      edges.emplace_back(tok[0], tok[1], parse_decimal(tok[2], line_no), line_no);
    } else {
      throw ParseError(where + "expected 'node label' or 'src dst prob'");
    }
  }
  if (!start || !end) throw ParseError("missing 'start' or 'end' header");

  auto lookup = [&](const std::string& id, std::size_t line) {
    auto it = ids.find(id);
    if (it == ids.end()) {
      throw ParseError("line " + std::to_string(line) + ": unknown node '" + id + "'");
    }
    return it->second;
  };
  std::vector<std::vector<Arc>> rows(labels.size());
  for (const auto& [src, dst, p, line] : edges) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw ParseError("line " + std::to_string(line) + ": probability must lie in (0, 1]");
    }
    rows[lookup(src, line)].push_back({lookup(dst, line), p});
  }
  for (const auto& [id, v] : ids) {
    if (rows[v].empty()) continue;
    double sum = 0.0;
    for (const Arc& a : rows[v]) sum += a.probability;
    if (std::abs(sum - 1.0) > 1e-6) {
      throw ParseError("outgoing probabilities of node '" + id + "' sum to " + format_number(sum));
    }
  }
  try {
    return TransitionGraph(std::move(labels), std::move(rows), lookup(*start, 0), lookup(*end, 0));
  } catch (const StructuralError& e) {
    throw ParseError(std::string("invalid transition graph: ") + e.what());
  }
}

std::string serialize_tg(const TransitionGraph& tg) {
  std::ostringstream out;
  out << "start n" << tg.start() << "\nend n" << tg.end() << "\n";
  for (std::size_t v = 0; v < tg.size(); ++v) out << "n" << v << " " << tg.label(v).to_string() << "\n";
  for (std::size_t v = 0; v < tg.size(); ++v) {
    for (const Arc& a : tg.successors(v)) {
      out << "n" << v << " n" << a.to << " " << format_number(a.probability) << "\n";
    }
  }
  return out.str();
}

std::vector<Trace> parse_log(std::string_view text) {
  std::vector<Trace> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    Trace t = split_trace(line);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_number(double x) {
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_traces_csv(std::ostream& out, const std::vector<ModelTrace>& traces) {
  out << "trace,probability\n";
  for (const auto& t : traces) out << csv_field(join_trace(t.labels)) << "," << format_number(t.probability) << "\n";
}

void write_ranking_csv(std::ostream& out, const Ranking& ranking) {
  const bool approx = !ranking.entries.empty() && ranking.entries.front().embedding_value;
  out << "rank,trace,probability,distance,similarity,score" << (approx ? ",embedding_value" : "") << "\n";
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const auto& r = ranking.entries[i];
    out << i + 1 << "," << csv_field(join_trace(r.model_trace.labels)) << ","
        << format_number(r.model_trace.probability) << "," << r.distance << ","
        << format_number(r.similarity) << "," << format_number(r.score);
    if (approx) out << "," << format_number(r.embedding_value.value_or(0.0));
    out << "\n";
  }
}

std::string ranking_json(const Trace& query, const Ranking& ranking) {
  nlohmann::ordered_json doc;
  doc["query"] = query;
  doc["truncated"] = ranking.truncated;
  doc["ranking"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const auto& r = ranking.entries[i];
    nlohmann::ordered_json row;
    row["rank"] = i + 1;
    row["trace"] = r.model_trace.labels;
    row["probability"] = r.model_trace.probability;
    row["distance"] = r.distance;
    row["similarity"] = r.similarity;
    row["score"] = r.score;
    if (r.embedding_value) row["embedding_value"] = *r.embedding_value;
    doc["ranking"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

void write_embedding_csv(std::ostream& out, const EmbeddingTable& table) {
  const auto& names = table.alphabet().names();
  out << "trace,probability";
  for (const auto& a : names) out << "," << csv_field(a);
  for (const auto& a : names) {
    for (const auto& b : names) out << "," << csv_field(a + " " + b);
  }
  out << "\n";
  for (std::size_t i = 0; i < table.traces().size(); ++i) {
    const auto& t = table.traces()[i];
    out << csv_field(join_trace(t.labels)) << "," << format_number(t.probability);
    for (double x : table.vectors()[i].values()) out << "," << format_number(x);
    out << "\n";
  }
}

}  // namespace ptalign
