#pragma once

#include <string>

#include "hmt/common.hpp"
#include "hmt/geometry.hpp"

namespace hmt {

// Text format: "NV NT NB", NV lines "x y", NT lines "i j k", NB lines "sigma_vertex volume_vertex".
void write_volume_mesh(const std::string& path, const VolumeMesh& mesh);
VolumeMesh read_volume_mesh(const std::string& path);

// "NV NP", NV lines "x y", NP lines "i j".
void write_curve_mesh(const std::string& path, const CurveMesh& mesh);
CurveMesh read_curve_mesh(const std::string& path);

// "rows cols" then row-major "re im" pairs.
void write_matrix_text(const std::string& path, const CMat& m);
CMat read_matrix_text(const std::string& path);

}  // namespace hmt
