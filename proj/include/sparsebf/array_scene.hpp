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

#ifndef SPARSEBF_ARRAY_SCENE_HPP
#define SPARSEBF_ARRAY_SCENE_HPP

#include "common.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace sparsebf
{
    // Uniform linear grid of candidate sensor locations.
    struct ArrayGeometry
    {
        std::size_t n_grid = 12;           // N, number of grid points
        double spacing_wavelengths = 0.5; // d / lambda

        void validate() const
        {
            if (n_grid < 2)
                throw invalid_argument("ArrayGeometry: n_grid must be >= 2");
            if (!(spacing_wavelengths > 0.0) || !std::isfinite(spacing_wavelengths))
                throw invalid_argument("ArrayGeometry: spacing must be positive");
        }
    };

    // Point source: direction of arrival in degrees from the array axis and
    // linear power.
    struct SourceSpec
    {
        double doa_deg = 90.0;
        double power = 1.0;
    };

    struct Scenario
    {
        SourceSpec desired;
        std::vector<SourceSpec> interferers;
        double noise_power = 1.0;

        std::size_t n_interferers() const noexcept { return interferers.size(); }

        // Range and positivity checks; these are what the numerical routines need.
        void check_physical() const
        {
            auto check_source = [](const SourceSpec &s, const char *what)
            {
                if (!(s.doa_deg > 0.0 && s.doa_deg < 180.0))
                    throw domain_error(std::string(what) + " DOA must lie strictly inside (0, 180) degrees");
                if (!(s.power > 0.0) || !std::isfinite(s.power))
                    throw invalid_argument(std::string(what) + " power must be positive");
            };
            check_source(desired, "desired source");
            for (const auto &i : interferers)
                check_source(i, "interferer");
            if (!(noise_power > 0.0) || !std::isfinite(noise_power))
                throw invalid_argument("noise power must be positive");
        }

        // Full scenario invariant: physical checks plus pairwise distinct DOAs.
        void validate() const
        {
            check_physical();
            std::vector<double> doas{desired.doa_deg};
            for (const auto &i : interferers)
                doas.push_back(i.doa_deg);
            std::sort(doas.begin(), doas.end());
            if (std::adjacent_find(doas.begin(), doas.end()) != doas.end())
                throw invalid_argument("scenario DOAs must be distinct");
        }
    };

    // s(theta)[k] = exp(j 2 pi (d/lambda) k cos(theta)), k = 0..N-1
    inline CVector steering_vector(const ArrayGeometry &geom, double doa_deg)
    {
        geom.validate();
        if (!(doa_deg > 0.0 && doa_deg < 180.0))
            throw domain_error("steering_vector: DOA must lie strictly inside (0, 180) degrees, got " +
                               std::to_string(doa_deg));
        const double phase_step = 2.0 * pi * geom.spacing_wavelengths * std::cos(deg2rad(doa_deg));
        CVector s(static_cast<Eigen::Index>(geom.n_grid));
        for (std::size_t k = 0; k < geom.n_grid; ++k)
        {
            const double phase = phase_step * static_cast<double>(k);
            s(static_cast<Eigen::Index>(k)) = cplx(std::cos(phase), std::sin(phase));
        }
        return s;
    }

    // Exact (infinite-snapshot) correlation matrices of a scenario.
    //   source             R_s  = sigma^2 s s^H
    //   interference_noise R_s' = sum_l sigma_l^2 v_l v_l^H + sigma_t^2 I
    //   total              R_xx = R_s + R_s'
    // The source steering vector and power are kept so rank-1 solves can use the
    // closed form directly.
    struct CorrelationSet
    {
        CMatrix source;
        CMatrix interference_noise;
        CMatrix total;
        CVector source_steering;
        double source_power = 0.0;

        std::size_t size() const noexcept { return static_cast<std::size_t>(total.rows()); }
    };

    inline CorrelationSet correlation_matrices(const ArrayGeometry &geom, const Scenario &scn)
    {
        geom.validate();
        scn.check_physical();
        const auto n = static_cast<Eigen::Index>(geom.n_grid);

        CorrelationSet out;
        out.source_steering = steering_vector(geom, scn.desired.doa_deg);
        out.source_power = scn.desired.power;
        out.source = scn.desired.power * (out.source_steering * out.source_steering.adjoint());

        out.interference_noise = CMatrix::Identity(n, n) * scn.noise_power;
        for (const auto &intf : scn.interferers)
        {
            const CVector v = steering_vector(geom, intf.doa_deg);
            out.interference_noise.noalias() += intf.power * (v * v.adjoint());
        }
        out.total = out.source + out.interference_noise;
        return out;
    }

    // First row of R: the N correlation lags r(0..N-1) of a Toeplitz matrix.
    inline CVector lag_vector(const CMatrix &r)
    {
        if (r.rows() != r.cols() || r.rows() == 0)
            throw invalid_argument("lag_vector: square nonempty matrix required");
        CVector lags = r.row(0).transpose();
        lags(0) = cplx(lags(0).real(), 0.0);
        return lags;
    }

    // ----- Scenario documents ------------------------------------------------
    // Human-readable form used by the CLI; powers are in dB relative to noise:
    //   { "desired_doa_deg": 60, "snr_db": 0,
    //     "interferer_doas_deg": [154, 55], "inr_db": [10, 20], "noise_power": 1 }

    inline Scenario scenario_from_json(const nlohmann::json &doc)
    {
        Scenario scn;
        try
        {
            scn.noise_power = doc.value("noise_power", 1.0);
            scn.desired.doa_deg = doc.at("desired_doa_deg").get<double>();
            scn.desired.power = scn.noise_power * db_to_linear(doc.value("snr_db", 0.0));
            const auto doas = doc.value("interferer_doas_deg", std::vector<double>{});
            const auto inrs = doc.value("inr_db", std::vector<double>{});
            if (doas.size() != inrs.size())
                throw format_error("scenario: interferer_doas_deg and inr_db must have equal length");
            for (std::size_t l = 0; l < doas.size(); ++l)
                scn.interferers.push_back({doas[l], scn.noise_power * db_to_linear(inrs[l])});
        }
        catch (const nlohmann::json::exception &e)
        {
            throw format_error(std::string("scenario document: ") + e.what());
        }
        scn.validate();
        return scn;
    }

    inline nlohmann::json scenario_to_json(const Scenario &scn)
    {
        nlohmann::json doc;
        doc["desired_doa_deg"] = scn.desired.doa_deg;
        doc["snr_db"] = linear_to_db(scn.desired.power / scn.noise_power);
        std::vector<double> doas, inrs;
        for (const auto &i : scn.interferers)
        {
            doas.push_back(i.doa_deg);
            inrs.push_back(linear_to_db(i.power / scn.noise_power));
        }
        doc["interferer_doas_deg"] = doas;
        doc["inr_db"] = inrs;
        doc["noise_power"] = scn.noise_power;
        return doc;
    }
}

#endif
