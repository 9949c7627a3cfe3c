#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "ovem/mesh.hpp"

namespace ovem {

enum class MeshFormat { json, off };

/// Malformed mesh file. `line()` is 1-based, 0 when unknown.
class MeshParseError : public std::runtime_error {
 public:
  MeshParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

/// JSON schema:
///   {"vertices": [[x,y],...], "cells": [[i0,i1,...],...],
///    "boundary": {"neumann_edges": [[i,j],...]}, "refinement": N}
/// OFF-like text: "OFF", then "nv nc 0", nv lines "x y [z]", nc lines "k i0 ... ik-1".
/// '#' starts a comment. Neumann tags are not representable in OFF.
[[nodiscard]] PolygonalMesh import_mesh(const std::filesystem::path& path, MeshFormat format);
void export_mesh(const PolygonalMesh& mesh, const std::filesystem::path& path, MeshFormat format);

[[nodiscard]] PolygonalMesh parse_mesh_json(const std::string& text);
[[nodiscard]] std::string mesh_to_json(const PolygonalMesh& mesh);
[[nodiscard]] PolygonalMesh parse_mesh_off(const std::string& text);
[[nodiscard]] std::string mesh_to_off(const PolygonalMesh& mesh);

/// Guesses the format from the extension (.off -> OFF, anything else JSON).
[[nodiscard]] MeshFormat format_from_extension(const std::filesystem::path& path);

}  // namespace ovem
