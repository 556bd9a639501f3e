// SPDX-License-Identifier: Apache-2.0
//
// sparsebf: sparse receive array design for MaxSINR beamforming
// Copyright (C) 2026 The sparsebf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Sparse beamformer spectral analysis.
//
// A selection mask z reshapes the spatial spectrum of every impinging signal:
// the DFT of z ⊙ x is the circular convolution of the two DFTs. The overlap
// objective Omega(z) sums, bin by bin, the masked desired-source power
// spectrum times each masked interferer power spectrum (weighted by their
// powers). Configurations with small overlap leave the beamformer room to
// null interference while keeping the source. The greedy selector adds one
// sensor at a time, always picking the grid location with the smallest Omega,
// restarted from every initial location; the restart with the best output
// SINR wins.

#ifndef SPARSEBF_SBSA_HPP
#define SPARSEBF_SBSA_HPP

#include "beamformer.hpp"

#include <unsupported/Eigen/FFT>

#include <bit>
#include <ostream>

namespace sparsebf
{
    // Pair counts of the active sensors per lag -(N-1)..(N-1).
    class LagRedundancy
    {
    public:
        explicit LagRedundancy(std::size_t n) : n_(n), counts_(2 * n - 1, 0) {}

        std::size_t grid_size() const noexcept { return n_; }
        std::ptrdiff_t max_lag() const noexcept { return static_cast<std::ptrdiff_t>(n_) - 1; }

        long at(std::ptrdiff_t lag) const { return counts_.at(static_cast<std::size_t>(lag + max_lag())); }
        long &at(std::ptrdiff_t lag) { return counts_.at(static_cast<std::size_t>(lag + max_lag())); }

        // Counts ordered from lag -(N-1) to N-1.
        const std::vector<long> &counts() const noexcept { return counts_; }

        long total() const
        {
            long s = 0;
            for (auto c : counts_)
                s += c;
            return s;
        }

    private:
        std::size_t n_;
        std::vector<long> counts_;
    };

    inline LagRedundancy selection_autocorrelation(const SelectionVector &z)
    {
        LagRedundancy out(z.size());
        const auto idx = z.indices();
        for (auto a : idx)
            for (auto b : idx)
                ++out.at(static_cast<std::ptrdiff_t>(a) - static_cast<std::ptrdiff_t>(b));
        return out;
    }

    struct Spectrum
    {
        std::vector<double> values;
        std::size_t dft_length = 0;
        double imag_residue = 0.0; // largest |Im| discarded before clamping

        std::size_t peak_bin() const
        {
            return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
        }

        double sum() const
        {
            double s = 0.0;
            for (auto v : values)
                s += v;
            return s;
        }
    };

    inline std::size_t default_dft_length(std::size_t n) { return 2 * std::bit_ceil(n); }

    namespace detail
    {
        inline void check_dft_length(std::size_t n, std::size_t k)
        {
            if (k < 2 * n - 1)
                throw invalid_argument("DFT length must be at least 2N-1 (got K=" + std::to_string(k) +
                                       ", N=" + std::to_string(n) + ")");
        }

        // DFT of a conjugate-symmetric lag sequence given by its non-negative half.
        inline Spectrum lag_sequence_spectrum(const std::vector<cplx> &half, std::size_t k, Eigen::FFT<double> &fft)
        {
            std::vector<cplx> seq(k, cplx(0.0, 0.0));
            seq[0] = half[0];
            for (std::size_t lag = 1; lag < half.size(); ++lag)
            {
                seq[lag] = half[lag];
                seq[k - lag] = std::conj(half[lag]);
            }
            std::vector<cplx> bins;
            fft.fwd(bins, seq);

            Spectrum out;
            out.dft_length = k;
            out.values.resize(k);
            for (std::size_t m = 0; m < k; ++m)
            {
                out.imag_residue = std::max(out.imag_residue, std::abs(bins[m].imag()));
                out.values[m] = std::max(0.0, bins[m].real());
            }
            return out;
        }
    }

    // K-point power spectrum of a (masked) spatial sequence, computed as the DFT
    // of its zero-padded deterministic autocorrelation
    //   r[l] = sum_n x[n+l] conj(x[n]),  r[-l] = conj(r[l]).
    inline Spectrum signal_spectrum(const CVector &masked, std::size_t dft_length)
    {
        const auto n = static_cast<std::size_t>(masked.size());
        detail::check_dft_length(n, dft_length);
        std::vector<cplx> r(n, cplx(0.0, 0.0));
        for (std::size_t lag = 0; lag < n; ++lag)
            for (std::size_t i = 0; i + lag < n; ++i)
                r[lag] += masked(static_cast<Eigen::Index>(i + lag)) * std::conj(masked(static_cast<Eigen::Index>(i)));
        Eigen::FFT<double> fft;
        return detail::lag_sequence_spectrum(r, dft_length, fft);
    }

    inline Spectrum signal_spectrum(const CVector &vec, const SelectionVector &z, std::size_t dft_length)
    {
        if (static_cast<std::size_t>(vec.size()) != z.size())
            throw invalid_argument("signal_spectrum: vector and mask lengths differ");
        CVector masked = vec;
        for (std::size_t i = 0; i < z.size(); ++i)
            if (!z.active(i))
                masked(static_cast<Eigen::Index>(i)) = 0.0;
        return signal_spectrum(masked, dft_length);
    }

    // DFT of the lag redundancy sequence itself.
    inline Spectrum redundancy_spectrum(const LagRedundancy &red, std::size_t dft_length)
    {
        detail::check_dft_length(red.grid_size(), dft_length);
        std::vector<cplx> half(red.grid_size());
        for (std::size_t lag = 0; lag < half.size(); ++lag)
            half[lag] = static_cast<double>(red.at(static_cast<std::ptrdiff_t>(lag)));
        Eigen::FFT<double> fft;
        return detail::lag_sequence_spectrum(half, dft_length, fft);
    }

    // Omega evaluation with steering vectors and FFT plan cached. One instance
    // per thread.
    class OmegaEvaluator
    {
    public:
        OmegaEvaluator(const ArrayGeometry &geom, const Scenario &scn, std::size_t dft_length)
            : n_(geom.n_grid), k_(dft_length), source_power_(scn.desired.power)
        {
            geom.validate();
            scn.check_physical();
            detail::check_dft_length(n_, k_);
            source_ = steering_vector(geom, scn.desired.doa_deg);
            for (const auto &i : scn.interferers)
            {
                interferers_.push_back(steering_vector(geom, i.doa_deg));
                powers_.push_back(i.power);
            }
        }

        std::size_t dft_length() const noexcept { return k_; }

        Spectrum masked_spectrum(const CVector &vec, std::span<const std::uint8_t> mask)
        {
            // Autocorrelation over active entries only.
            std::vector<cplx> r(n_, cplx(0.0, 0.0));
            active_.clear();
            for (std::size_t i = 0; i < n_; ++i)
                if (mask[i])
                    active_.push_back(i);
            for (std::size_t a = 0; a < active_.size(); ++a)
                for (std::size_t b = 0; b <= a; ++b)
                {
                    const std::size_t hi = active_[a], lo = active_[b];
                    r[hi - lo] += vec(static_cast<Eigen::Index>(hi)) * std::conj(vec(static_cast<Eigen::Index>(lo)));
                }
            return detail::lag_sequence_spectrum(r, k_, fft_);
        }

        Spectrum source_spectrum(std::span<const std::uint8_t> mask) { return masked_spectrum(source_, mask); }
        Spectrum interferer_spectrum(std::size_t l, std::span<const std::uint8_t> mask) { return masked_spectrum(interferers_.at(l), mask); }

        // Contribution of each interferer; Omega is their sum.
        std::vector<double> omega_terms(std::span<const std::uint8_t> mask)
        {
            if (mask.size() != n_)
                throw invalid_argument("omega: mask length does not match grid");
            std::vector<double> terms(interferers_.size(), 0.0);
            if (interferers_.empty())
                return terms;
            const Spectrum s = source_spectrum(mask);
            for (std::size_t l = 0; l < interferers_.size(); ++l)
            {
                const Spectrum v = interferer_spectrum(l, mask);
                double acc = 0.0;
                for (std::size_t m = 0; m < k_; ++m)
                    acc += s.values[m] * v.values[m];
                terms[l] = source_power_ * powers_[l] * acc;
            }
            return terms;
        }

        double omega(std::span<const std::uint8_t> mask)
        {
            double total = 0.0;
            for (double t : omega_terms(mask))
                total += t;
            return total;
        }

    private:
        std::size_t n_;
        std::size_t k_;
        double source_power_;
        CVector source_;
        std::vector<CVector> interferers_;
        std::vector<double> powers_;
        std::vector<std::size_t> active_;
        Eigen::FFT<double> fft_;
    };

    inline double omega(const SelectionVector &z, const ArrayGeometry &geom, const Scenario &scn, std::size_t dft_length)
    {
        if (z.size() != geom.n_grid)
            throw invalid_argument("omega: selection length does not match grid");
        OmegaEvaluator eval(geom, scn, dft_length);
        return eval.omega(z.mask());
    }

    // ----- Greedy selection --------------------------------------------------

    struct SbsaConfig
    {
        std::size_t dft_length = 0;              // 0 selects 2 * next_pow2(N)
        std::size_t n_starts = 0;                // 0 selects N (every grid location)
        std::uint64_t rng_seed = 0;              // orders the starts when n_starts < N
        std::vector<std::size_t> start_indices;  // explicit starts override n_starts
        unsigned threads = 0;                    // 0 = hardware concurrency

        std::size_t resolved_dft_length(std::size_t n) const { return dft_length == 0 ? default_dft_length(n) : dft_length; }

        // Initial sensor locations, in evaluation order.
        std::vector<std::size_t> resolved_starts(std::size_t n) const
        {
            if (!start_indices.empty())
            {
                for (auto s : start_indices)
                    if (s >= n)
                        throw invalid_argument("SbsaConfig: start index out of range");
                return start_indices;
            }
            const std::size_t count = n_starts == 0 ? n : n_starts;
            std::vector<std::size_t> order(n);
            for (std::size_t i = 0; i < n; ++i)
                order[i] = i;
            if (count >= n)
                return order;
            // Seeded Fisher-Yates; the first `count` entries are the starts, so
            // raising n_starts only appends starts.
            auto rng = make_engine(rng_seed, 0x5b5a);
            for (std::size_t i = n - 1; i > 0; --i)
                std::swap(order[i], order[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i)))]);
            order.resize(count);
            return order;
        }
    };

    struct SbsaStep
    {
        std::size_t chosen = 0;
        double omega = 0.0;
    };

    struct SbsaStartTrace
    {
        std::size_t start_index = 0;
        std::vector<SbsaStep> steps; // greedy additions after the start
        SelectionVector selection;
        double sinr_linear = 0.0;
    };

    struct SbsaResult
    {
        SelectionVector selection;
        BeamformerWeights weights;
        SinrValue sinr;
        std::vector<SbsaStartTrace> starts;
        std::size_t best_start = 0; // position in `starts`
    };

    namespace detail
    {
        inline SbsaStartTrace sbsa_greedy_from(std::size_t start, std::size_t p, OmegaEvaluator &omega_eval,
                                               SinrEvaluator &sinr_eval, std::size_t n)
        {
            SbsaStartTrace trace;
            trace.start_index = start;
            std::vector<std::uint8_t> mask(n, 0);
            mask[start] = 1;
            for (std::size_t placed = 1; placed < p; ++placed)
            {
                std::size_t best_idx = n;
                double best_omega = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < n; ++c)
                {
                    if (mask[c])
                        continue;
                    mask[c] = 1;
                    const double om = omega_eval.omega(mask);
                    mask[c] = 0;
                    if (om < best_omega) // strict: lowest index wins ties
                    {
                        best_omega = om;
                        best_idx = c;
                    }
                }
                mask[best_idx] = 1;
                trace.steps.push_back({best_idx, best_omega});
            }
            trace.selection = SelectionVector(mask);
            trace.sinr_linear = sinr_eval.sinr_linear(trace.selection);
            return trace;
        }
    }

    inline SbsaResult sbsa_select(const ArrayGeometry &geom, const Scenario &scn, std::size_t p, const SbsaConfig &cfg = {})
    {
        geom.validate();
        scn.check_physical();
        const std::size_t n = geom.n_grid;
        if (p < 1 || p > n)
            throw invalid_argument("sbsa_select: invalid P=" + std::to_string(p) + " for N=" + std::to_string(n));
        const std::size_t k = cfg.resolved_dft_length(n);
        detail::check_dft_length(n, k);
        const auto starts = cfg.resolved_starts(n);

        const CorrelationSet corr = correlation_matrices(geom, scn);
        SbsaResult result;
        result.starts.resize(starts.size());
        parallel_for(starts.size(), cfg.threads, [&](std::size_t i)
                     {
            OmegaEvaluator omega_eval(geom, scn, k);
            SinrEvaluator sinr_eval(corr);
            result.starts[i] = detail::sbsa_greedy_from(starts[i], p, omega_eval, sinr_eval, n); });

        for (std::size_t i = 1; i < result.starts.size(); ++i)
            if (result.starts[i].sinr_linear > result.starts[result.best_start].sinr_linear)
                result.best_start = i;

        result.selection = result.starts[result.best_start].selection;
        result.weights = max_sinr_weights(corr, result.selection);
        result.sinr = output_sinr(result.weights, corr);
        return result;
    }

    // Per-start trace as CSV: start_index, step, chosen_index, omega.
    inline void write_sbsa_trace_csv(std::ostream &os, const SbsaResult &res)
    {
        os << "start_index,step,chosen_index,omega\n";
        os.precision(17);
        for (const auto &st : res.starts)
        {
            os << st.start_index << ",0," << st.start_index << ",\n";
            for (std::size_t s = 0; s < st.steps.size(); ++s)
                os << st.start_index << ',' << (s + 1) << ',' << st.steps[s].chosen << ',' << st.steps[s].omega << '\n';
        }
    }

    inline void write_spectrum_csv(std::ostream &os, const Spectrum &spectrum)
    {
        os << "bin,value\n";
        os.precision(17);
        for (std::size_t m = 0; m < spectrum.values.size(); ++m)
            os << m << ',' << spectrum.values[m] << '\n';
    }
}

#endif
