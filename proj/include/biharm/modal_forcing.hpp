#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "biharm/problem.hpp"

namespace biharm {

class SectionOperator;

/// Right-hand sides f-(x), f+(x) expressed in the eigenbasis of A: one scalar
/// function per mode and side. Either closed form or interpolated from samples
/// on a uniform grid of each interval.
class ModalForcing {
public:
    using Function = std::function<double(Side side, std::size_t mode, double x)>;

    /// f = 0 everywhere.
    static ModalForcing zero();

    static ModalForcing from_function(Function f, std::string tag);

    /// samples[side][mode] holds n values on the uniform grid left..right of
    /// that side (endpoints included). Every (side, mode) entry must have the
    /// same count; empty entries mean zero forcing for that mode.
    static ModalForcing from_samples(const CylinderGeometry& geom,
                                     std::vector<std::vector<double>> minus_samples,
                                     std::vector<std::vector<double>> plus_samples);

    /// Mode-wise (k^2 - mu_j)^2 sin(k (x - left)), k = wave * pi / length, on the
    /// chosen sides. The particular solution is exactly sin(k (x - left)).
    static ModalForcing sine(const SectionOperator& section, const CylinderGeometry& geom, bool minus, bool plus,
                             int wave);

    double operator()(Side side, std::size_t mode, double x) const;
    bool is_zero() const { return zero_; }
    const std::string& tag() const { return tag_; }

private:
    Function fn_;
    std::string tag_;
    bool zero_ = false;
};

/// CSV ingestion: header `x,mode_index,value,side`, side is `minus` or `plus`.
/// Samples of each (side, mode) must cover that interval on a uniform grid with
/// endpoints; all groups must have the same count. Throws InputError.
ModalForcing read_modal_forcing_csv(const std::string& path, const CylinderGeometry& geom, std::size_t modes);
ModalForcing parse_modal_forcing_csv(const std::string& text, const CylinderGeometry& geom, std::size_t modes);

/// Four-point Lagrange interpolation of uniform samples y_0..y_N on [left, right].
double interpolate_uniform(const double* y, std::size_t count, double left, double right, double x);

}  // namespace biharm
