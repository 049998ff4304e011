// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "taxiverify/renderer.hpp"
#include "taxiverify/rng.hpp"

namespace taxiverify {

struct DataRecord {
    double p = 0.0;
    double theta = 0.0;
    double z1 = 0.0;
    double z2 = 0.0;
    Vec image;  // kImagePixels, row-major
};

struct Dataset {
    std::vector<DataRecord> records;
    RendererParams renderer;

    std::size_t size() const { return records.size(); }
};

/// n rendered records with states uniform over the state domain and latents
/// uniform over [-1,1]^2; reproducible from the seed.
inline Dataset make_dataset(std::size_t n, std::uint64_t seed, const RendererParams& rp = {},
                            const Box& state_domain = Box{{-11.0, -30.0}, {11.0, 30.0}},
                            const Box& latent_domain = Box{{-1.0, -1.0}, {1.0, 1.0}}) {
    if (n == 0) throw std::invalid_argument("make_dataset: n must be >= 1");
    state_domain.validate();
    latent_domain.validate();
    Dataset ds;
    ds.renderer = rp;
    ds.records.reserve(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        DataRecord rec;
        rec.p = rng.uniform(state_domain.lo[0], state_domain.hi[0]);
        rec.theta = rng.uniform(state_domain.lo[1], state_domain.hi[1]);
        rec.z1 = rng.uniform(latent_domain.lo[0], latent_domain.hi[0]);
        rec.z2 = rng.uniform(latent_domain.lo[1], latent_domain.hi[1]);
        rec.image = render({rec.p, rec.theta}, {rec.z1, rec.z2}, rp);
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

}  // namespace taxiverify
