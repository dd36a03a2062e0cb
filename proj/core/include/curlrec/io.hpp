// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "curlrec/mesh.hpp"

namespace curlrec {

/// Plain-text mesh format:
///   vertices N
///   x y            (N lines)
///   cells M
///   i j k          (M lines, 0-based, counterclockwise)
/// The reader reports malformed input with line numbers; the boundary is
/// inferred from edge multiplicity by the mesh builder.
Mesh read_mesh(std::istream& is);
Mesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& os, const Mesh& mesh);

}  // namespace curlrec
