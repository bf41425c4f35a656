#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "meshrft/mesh.hpp"

namespace meshrft {

struct QuadMesh;

/// Reads `v` and `f` records. Polygons are fan-triangulated at their first
/// corner; texture/normal indices, groups and materials are ignored.
/// Free-form geometry records raise UnsupportedFeatureError.
Mesh load_obj(const std::filesystem::path& path);
Mesh parse_obj(std::istream& in, const std::string& source_name = "<stream>");

/// Vertex positions only; faces, if any, are ignored.
std::vector<Vec3> load_obj_vertices(const std::filesystem::path& path);

void save_obj(const std::filesystem::path& path, const Mesh& mesh);
void write_obj(std::ostream& out, const Mesh& mesh);

/// Quads as 4-index `f` records followed by residual triangles.
void write_quad_obj(std::ostream& out, const QuadMesh& quads, const Mesh& mesh);

}  // namespace meshrft
