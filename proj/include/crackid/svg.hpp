#pragma once

#include <iosfwd>
#include <vector>

#include "crackid/driver.hpp"

namespace crackid {

/// Mesh in the current configuration x + z(x); triangles touching the
/// breaking line are filled by node status (contact, cohesion).
void write_deformed_svg(std::ostream& os, const BrokenMesh& mesh, const Vector& z, const ActiveSet& active);

/// J ratio and shape-error ratio against n on a log axis.
void write_ratios_svg(std::ostream& os, const IterationLog& log);

/// Selected interface snapshots over the true interface.
void write_interfaces_svg(std::ostream& os, const IterationLog& log, const InterfaceGraph& truth,
                          const std::vector<int>& selection = {0, 10, 20, 40, 100, 200});

}  // namespace crackid
