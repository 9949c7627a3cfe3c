#include "ovem/mesh_io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace ovem {

namespace {

using nlohmann::json;

int line_of_byte(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Line numbers for JSON structural errors are recovered by locating the
// offending array element in the source text.
int line_of_array_element(const std::string& text, const std::string& key, std::size_t index) {
  const std::size_t k = text.find("\"" + key + "\"");
  if (k == std::string::npos) return 0;
  std::size_t pos = text.find('[', k);
  if (pos == std::string::npos) return 0;
  int depth = 0;
  std::size_t count = 0;
  for (std::size_t i = pos; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '[') {
      ++depth;
      if (depth == 2) {
        if (count == index) return line_of_byte(text, i);
        ++count;
      }
    } else if (ch == ']') {
      if (--depth == 0) break;
    }
  }
  return 0;
}

}  // namespace

MeshFormat format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".off" ? MeshFormat::off : MeshFormat::json;
}

PolygonalMesh parse_mesh_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MeshParseError(e.what(), line_of_byte(text, e.byte));
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("cells")) {
    throw MeshParseError("mesh JSON needs \"vertices\" and \"cells\"", 1);
  }
  std::vector<Point> vertices;
  const auto& jv = doc["vertices"];
  if (!jv.is_array()) throw MeshParseError("\"vertices\" must be an array", line_of_array_element(text, "vertices", 0));
  for (std::size_t i = 0; i < jv.size(); ++i) {
    const auto& p = jv[i];
    if (!p.is_array() || p.size() < 2 || !p[0].is_number() || !p[1].is_number()) {
      throw MeshParseError("vertex " + std::to_string(i) + " must be [x, y]",
                           line_of_array_element(text, "vertices", i));
    }
    vertices.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  std::vector<std::vector<int>> cells;
  const auto& jc = doc["cells"];
  if (!jc.is_array()) throw MeshParseError("\"cells\" must be an array", line_of_array_element(text, "cells", 0));
  for (std::size_t c = 0; c < jc.size(); ++c) {
    const auto& loop = jc[c];
    const int line = line_of_array_element(text, "cells", c);
    if (!loop.is_array()) throw MeshParseError("cell " + std::to_string(c) + " must be an index list", line);
    std::vector<int> ids;
    for (const auto& v : loop) {
      if (!v.is_number_integer()) throw MeshParseError("cell " + std::to_string(c) + " has a non-integer index", line);
      const long long id = v.get<long long>();
      if (id < 0 || id >= static_cast<long long>(vertices.size())) {
        throw MeshParseError("cell " + std::to_string(c) + " references vertex " + std::to_string(id) + " of " +
                                 std::to_string(vertices.size()),
                             line);
      }
      ids.push_back(static_cast<int>(id));
    }
    cells.push_back(std::move(ids));
  }
  std::vector<PolygonalMesh::EdgeKey> neumann;
  if (doc.contains("boundary") && doc["boundary"].contains("neumann_edges")) {
    for (const auto& e : doc["boundary"]["neumann_edges"]) {
      if (!e.is_array() || e.size() != 2) throw MeshParseError("neumann edge must be [i, j]", 0);
      neumann.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  }
  const int refinement = doc.value("refinement", 0);
  return PolygonalMesh(std::move(vertices), std::move(cells), neumann, refinement);
}

std::string mesh_to_json(const PolygonalMesh& mesh) {
  json doc;
  json vertices = json::array();
  for (const Point& p : mesh.vertices()) vertices.push_back({p.x(), p.y()});
  doc["vertices"] = std::move(vertices);
  doc["cells"] = mesh.cells();
  json neumann = json::array();
  for (const auto& [a, b] : mesh.neumann_edges()) neumann.push_back({a, b});
  doc["boundary"] = {{"neumann_edges", std::move(neumann)}};
  doc["refinement"] = mesh.refinement();
  return doc.dump() + "\n";
}

PolygonalMesh parse_mesh_off(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  auto next_line = [&](std::istringstream& fields) -> bool {
    while (std::getline(in, raw)) {
      ++line_no;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
      fields.clear();
      fields.str(raw);
      return true;
    }
    return false;
  };

  std::istringstream fields;
  if (!next_line(fields)) throw MeshParseError("empty OFF file", 0);
  std::string magic;
  fields >> magic;
  if (magic != "OFF") throw MeshParseError("expected 'OFF' header, got '" + magic + "'", line_no);
  // counts may follow on the header line
  long long nv = -1;
  long long nc = -1;
  if (!(fields >> nv >> nc)) {
    if (!next_line(fields) || !(fields >> nv >> nc)) throw MeshParseError("expected vertex and cell counts", line_no);
  }
  if (nv < 0 || nc < 0) throw MeshParseError("negative counts", line_no);

  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    double x = 0.0;
    double y = 0.0;
    if (!next_line(fields) || !(fields >> x >> y)) {
      throw MeshParseError("malformed vertex " + std::to_string(i), line_no);
    }
    vertices.emplace_back(x, y);
  }
  std::vector<std::vector<int>> cells;
  cells.reserve(static_cast<std::size_t>(nc));
  for (long long c = 0; c < nc; ++c) {
    long long k = 0;
    if (!next_line(fields) || !(fields >> k) || k < 3) {
      throw MeshParseError("malformed cell " + std::to_string(c), line_no);
    }
    std::vector<int> loop;
    for (long long i = 0; i < k; ++i) {
      long long id = 0;
      if (!(fields >> id)) throw MeshParseError("cell " + std::to_string(c) + " is missing indices", line_no);
      if (id < 0 || id >= nv) {
        throw MeshParseError(
            "cell " + std::to_string(c) + " references vertex " + std::to_string(id) + " of " + std::to_string(nv),
            line_no);
      }
      loop.push_back(static_cast<int>(id));
    }
    cells.push_back(std::move(loop));
  }
  return PolygonalMesh(std::move(vertices), std::move(cells));
}

std::string mesh_to_off(const PolygonalMesh& mesh) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_cells() << " 0\n";
  for (const Point& p : mesh.vertices()) out << p.x() << ' ' << p.y() << " 0\n";
  for (const auto& loop : mesh.cells()) {
    out << loop.size();
    for (int v : loop) out << ' ' << v;
    out << '\n';
  }
  return out.str();
}

PolygonalMesh import_mesh(const std::filesystem::path& path, MeshFormat format) {
  const std::string text = read_file(path);
  return format == MeshFormat::json ? parse_mesh_json(text) : parse_mesh_off(text);
}

void export_mesh(const PolygonalMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << (format == MeshFormat::json ? mesh_to_json(mesh) : mesh_to_off(mesh));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace ovem
