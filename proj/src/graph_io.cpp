#include <fstream>
#include <sstream>

#include "json.hpp"
#include "netdecomp/graph.hpp"

namespace netdecomp {

namespace {

using nlohmann::json;

Rational parse_rational(const std::string& tok, std::size_t line) {
  const auto slash = tok.find('/');
  try {
    std::size_t used = 0;
    Rational r;
    if (slash == std::string::npos) {
      r.num = std::stoll(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      r.den = 1;
    } else {
      const std::string a = tok.substr(0, slash);
      const std::string b = tok.substr(slash + 1);
      r.num = std::stoll(a, &used);
      if (used != a.size()) throw std::invalid_argument(tok);
      r.den = std::stoll(b, &used);
      if (used != b.size()) throw std::invalid_argument(tok);
    }
    return r;
  } catch (const std::logic_error&) {
    throw GraphError("line " + std::to_string(line) + ": bad weight '" + tok + "'");
  }
}

std::uint64_t parse_count(const std::string& tok, std::size_t line, const char* what) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
    throw GraphError("line " + std::to_string(line) + ": bad " + what + " '" + tok + "'");
  }
  try {
    return std::stoull(tok);
  } catch (const std::logic_error&) {
    throw GraphError("line " + std::to_string(line) + ": bad " + what + " '" + tok + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Graph parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::vector<Edge> edges;
  std::vector<Rational> weights;
  bool any_weight = false;
  std::size_t unweighted = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (!have_header) {
      if (tok.size() != 2) throw GraphError("line " + std::to_string(line_no) + ": expected 'n m'");
      n = parse_count(tok[0], line_no, "node count");
      m = parse_count(tok[1], line_no, "edge count");
      have_header = true;
      continue;
    }
    if (tok.size() != 2 && tok.size() != 3) {
      throw GraphError("line " + std::to_string(line_no) + ": expected 'u v' or 'u v num/den'");
    }
    const auto u = parse_count(tok[0], line_no, "endpoint");
    const auto v = parse_count(tok[1], line_no, "endpoint");
    if (u >= n || v >= n) {
      throw GraphError("line " + std::to_string(line_no) + ": endpoint out of range");
    }
    if (u == v) throw GraphError("line " + std::to_string(line_no) + ": self-loop at node " + tok[0]);
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    if (tok.size() == 3) {
      weights.push_back(parse_rational(tok[2], line_no));
      any_weight = true;
    } else {
      weights.push_back({});
      ++unweighted;
    }
  }
  if (!have_header) throw GraphError("line " + std::to_string(line_no) + ": missing 'n m' header");
  if (n == 0) throw GraphError("line 1: node count must be positive");
  if (edges.size() != m) {
    throw GraphError("line " + std::to_string(line_no) + ": header promised " + std::to_string(m) +
                     " edges, found " + std::to_string(edges.size()));
  }
  if (any_weight && unweighted > 0) throw GraphError("either all edges carry weights or none do");
  std::optional<std::vector<Rational>> w;
  if (any_weight) w = std::move(weights);
  return Graph::from_edges(n, std::move(edges), std::move(w));
}

Graph parse_graph_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GraphError(std::string("json parse error: ") + e.what());
  }
  try {
    const auto n = j.at("n").get<std::size_t>();
    if (n == 0) throw GraphError("node count must be positive");
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw GraphError("edge entries must be [u, v]");
      edges.push_back({e[0].get<Vertex>(), e[1].get<Vertex>()});
    }
    std::optional<std::vector<Rational>> w;
    if (j.contains("weights")) {
      std::vector<Rational> ws;
      for (const auto& x : j.at("weights")) {
        if (x.is_array() && x.size() == 2) {
          ws.push_back({x[0].get<std::int64_t>(), x[1].get<std::int64_t>()});
        } else if (x.is_string()) {
          ws.push_back(parse_rational(x.get<std::string>(), 0));
        } else {
          ws.push_back({x.get<std::int64_t>(), 1});
        }
      }
      w = std::move(ws);
    }
    std::vector<Ident> ids;
    if (j.contains("ids")) {
      for (const auto& x : j.at("ids")) {
        ids.push_back(x.is_string() ? ident_from_string(x.get<std::string>()) : Ident{x.get<std::uint64_t>()});
      }
    }
    return Graph::from_edges(n, std::move(edges), std::move(w), std::move(ids));
  } catch (const json::exception& e) {
    throw GraphError(std::string("json graph: ") + e.what());
  }
}

Graph load_graph(const std::string& path, GraphFormat format) {
  const std::string text = read_file(path);
  return format == GraphFormat::kJson ? parse_graph_json(text) : parse_edge_list(text);
}

std::string graph_to_json(const Graph& g) {
  json j;
  j["n"] = g.size();
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  j["edges"] = std::move(edges);
  if (g.weighted()) {
    json w = json::array();
    for (const auto& r : g.weights()) w.push_back({r.num, r.den});
    j["weights"] = std::move(w);
  }
  if (g.has_custom_idents()) {
    json ids = json::array();
    for (Vertex v = 0; v < g.size(); ++v) ids.push_back(ident_to_string(g.ident(v)));
    j["ids"] = std::move(ids);
  }
  return j.dump();
}

std::string graph_to_edge_list(const Graph& g) {
  std::ostringstream out;
  out << g.size() << ' ' << g.edge_count() << '\n';
  for (EdgeId id = 0; id < g.edge_count(); ++id) {
    const auto& e = g.edge(id);
    out << e.u << ' ' << e.v;
    if (g.weighted()) out << ' ' << g.weight(id).to_string();
    out << '\n';
  }
  return out.str();
}

}  // namespace netdecomp
