#ifndef ECOPLUS_CSV_HPP
#define ECOPLUS_CSV_HPP

#include "ecoplus/pwa.hpp"
#include "ecoplus/types.hpp"

#include <iosfwd>
#include <string>

namespace ecoplus {

/// 9-significant-digit float formatting used by every CSV artifact.
std::string format_g9(double v);

/// Header `i,t,x,v,a,u,J` (plus `rate` when given); t = i * dt. The jerk and
/// rate cells of the final row are empty (undefined by the forward
/// difference / left integration rule).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<double>* rates = nullptr);
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<double>* rates = nullptr);

/// Parses a trajectory CSV produced by write_trajectory_csv (a trailing
/// rate column is accepted and ignored).
Trajectory read_trajectory_csv(const std::string& path);

/// Header `k,b1,b2`, one row per affine piece.
void write_pwa_csv(std::ostream& os, const PwaSegments& seg);

} // namespace ecoplus

#endif // ECOPLUS_CSV_HPP
