// SPDX-License-Identifier: Apache-2.0
#include "isac/sensing.hpp"

#include <cmath>
#include <algorithm>
#include <cstdlib>
#include <limits>

#include "isac/errors.hpp"

namespace isac {

CMatrix sample_covariance(const CMatrix& samples) {
    if (samples.cols() == 0) throw ContractViolation("sample_covariance: no samples");
    CMatrix r = (samples * samples.adjoint()) / static_cast<double>(samples.cols());
    return hermitian_part(r);
}

CMatrix ul_free_covariance(const CMatrix& sample_cov, const CMatrix& analog_combiner,
                           const std::vector<std::vector<CMatrix>>& precoded_ul, double stream_power) {
    if (sample_cov.rows() != analog_combiner.cols() || sample_cov.cols() != analog_combiner.cols())
        throw ContractViolation("ul_free_covariance: covariance does not match combiner");
    CMatrix ul = CMatrix::Zero(sample_cov.rows(), sample_cov.cols());
    Index subcarriers = 0;
    for (const auto& user : precoded_ul) {
        if (subcarriers == 0) subcarriers = static_cast<Index>(user.size());
        if (static_cast<Index>(user.size()) != subcarriers)
            throw ContractViolation("ul_free_covariance: users disagree on subcarrier count");
        for (const auto& gv : user) {
            const CMatrix x = analog_combiner.adjoint() * gv;
            ul.noalias() += x * x.adjoint();
        }
    }
    if (subcarriers > 0) ul *= stream_power / static_cast<double>(subcarriers);
    return hermitian_part(sample_cov - ul);
}

Whitened whiten(const CMatrix& covariance, const CMatrix& analog_combiner) {
    Whitened out;
    out.lower = cholesky(analog_combiner.adjoint() * analog_combiner);
    const CMatrix half = lower_solve(out.lower, covariance);                  // L^-1 R
    const CMatrix full = lower_solve(out.lower, half.adjoint()).adjoint();   // L^-1 R L^-H
    out.covariance = hermitian_part(full);
    return out;
}

AngleEstimate beamspace_music(const Whitened& whitened, const CMatrix& analog_combiner, double initial_angle,
                              double window, double step, Index n_sources) {
    if (!(window > 0.0) || !(step > 0.0)) throw ContractViolation("beamspace_music: window and step must be positive");
    const Index n_rf = whitened.covariance.rows();
    if (n_sources < 1 || n_sources >= n_rf) throw ContractViolation("beamspace_music: bad source count");
    if (analog_combiner.cols() != n_rf) throw ContractViolation("beamspace_music: combiner does not match covariance");

    const EigenDecomposition eig = hermitian_eig(whitened.covariance);
    const double spread = eig.values.maxCoeff() - eig.values.minCoeff();
    const double scale = eig.values.cwiseAbs().maxCoeff();
    if (!(spread > 1e-9 * scale)) throw NoPeakError("beamspace_music: eigenvalues are degenerate");
    const CMatrix noise_sub = eig.vectors.rightCols(n_rf - n_sources);

    AngleEstimate est;
    est.window = window;
    const auto points = static_cast<Index>(std::floor(2.0 * window / step + 1e-9)) + 1;
    est.grid.reserve(static_cast<std::size_t>(points));
    est.pseudospectrum.reserve(static_cast<std::size_t>(points));
    double best = -1.0;
    for (Index k = 0; k < points; ++k) {
        const double theta = initial_angle - window + static_cast<double>(k) * step;
        const CVector b = lower_solve(whitened.lower, analog_combiner.adjoint() * array_response(analog_combiner.rows(), theta));
        const double proj = (noise_sub.adjoint() * b).squaredNorm();
        const double p = proj > 0.0 ? b.squaredNorm() / proj : std::numeric_limits<double>::infinity();
        est.grid.push_back(theta);
        est.pseudospectrum.push_back(p);
        if (p > best) {
            best = p;
            est.refined_angle = theta;
        }
    }
    return est;
}

cd radar_scalar(double angle, const CVector& mvdr, const CMatrix& analog_combiner,
                const std::vector<CMatrix>& precoders, const std::vector<CVector>& symbols) {
    if (precoders.size() != symbols.size()) throw ContractViolation("radar_scalar: precoder/symbol count mismatch");
    const CVector a_r = array_response(analog_combiner.rows(), angle);
    const cd rx = mvdr.dot(analog_combiner.adjoint() * a_r);
    cd tx{0.0, 0.0};
    for (std::size_t i = 0; i < precoders.size(); ++i) {
        const CVector a_t = array_response(precoders[i].rows(), angle);
        tx += a_t.dot(precoders[i] * symbols[i]);
    }
    return rx * tx;
}

RadarImage radar_image(const CMatrix& radar_samples, const CMatrix& radar_scalars) {
    if (radar_samples.rows() != radar_scalars.rows() || radar_samples.cols() != radar_scalars.cols())
        throw ContractViolation("radar_image: sample and scalar grids differ");
    RadarImage out;
    out.z = CMatrix::Zero(radar_samples.rows(), radar_samples.cols());
    for (Index n = 0; n < radar_samples.cols(); ++n) {
        for (Index m = 0; m < radar_samples.rows(); ++m) {
            const cd c = radar_scalars(m, n);
            const double mag2 = std::norm(c);
            if (std::sqrt(mag2) < kRadarScalarFloor) {
                ++out.masked;
                continue;
            }
            out.z(m, n) = std::conj(c) / mag2 * radar_samples(m, n);
        }
    }
    return out;
}

double doppler_bin_velocity(double doppler_index, Index doppler_len, double wavelength, double symbol_duration) {
    return doppler_index * wavelength / (static_cast<double>(doppler_len) * symbol_duration);
}

RangeVelocityEstimate range_velocity_estimate(const CMatrix& z, const OfdmNumerology& num, Index range_len,
                                              Index doppler_len) {
    RangeVelocityEstimate est;
    RangeDopplerMap& map = est.map;
    map.image = range_doppler_transform(z, range_len, doppler_len);
    map.range_bin = kSpeedOfLight / (2.0 * static_cast<double>(range_len) * num.subcarrier_spacing);
    map.velocity_bin = num.wavelength() / (static_cast<double>(doppler_len) * num.symbol_duration());

    double best = -1.0;
    for (Index mt = 0; mt < map.image.rows(); ++mt) {
        for (Index nt = 0; nt < map.image.cols(); ++nt) {
            const double mag = std::abs(map.image(mt, nt));
            if (mag > best) {
                best = mag;
                map.peak_range_index = mt;
                map.peak_doppler_index = nt;
            }
        }
    }
    est.range = static_cast<double>(map.peak_range_index) * map.range_bin;
    Index signed_doppler = map.peak_doppler_index;
    if (signed_doppler > doppler_len / 2) signed_doppler -= doppler_len;
    est.velocity = 0.5 * doppler_bin_velocity(static_cast<double>(signed_doppler), doppler_len, num.wavelength(),
                                              num.symbol_duration());
    return est;
}

double peak_to_second_peak_ratio(const RangeDopplerMap& map, Index guard) {
    const Index rows = map.image.rows();
    const Index cols = map.image.cols();
    const auto circ = [](Index a, Index b, Index len) {
        const Index d = std::abs(a - b) % len;
        return std::min(d, len - d);
    };
    const double peak = std::abs(map.image(map.peak_range_index, map.peak_doppler_index));
    double second = 0.0;
    for (Index mt = 0; mt < rows; ++mt) {
        if (circ(mt, map.peak_range_index, rows) <= guard) continue;
        for (Index nt = 0; nt < cols; ++nt) {
            if (circ(nt, map.peak_doppler_index, cols) <= guard) continue;
            second = std::max(second, std::abs(map.image(mt, nt)));
        }
    }
    if (second <= 0.0) return std::numeric_limits<double>::infinity();
    return peak / second;
}

}  // namespace isac
