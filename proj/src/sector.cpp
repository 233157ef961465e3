#include "relcon/sector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "relcon/error.hpp"

namespace relcon {

SectorBounds::SectorBounds(std::vector<double> sigma1, std::vector<double> sigma2)
    : sigma1_(std::move(sigma1)), sigma2_(std::move(sigma2)) {
    if (sigma1_.size() != sigma2_.size() || sigma1_.empty()) {
        throw Error(ErrorCode::InvalidSector, "sector bound lists must be non-empty and equal length");
    }
    for (std::size_t k = 0; k < sigma1_.size(); ++k) {
        if (!(sigma1_[k] < sigma2_[k])) {
            throw Error(ErrorCode::InvalidSector,
                        "sector bounds require sigma1 < sigma2 (component " + std::to_string(k + 1) + ")");
        }
    }
}

SectorBounds SectorBounds::scalar(int n, double sigma1, double sigma2) {
    return {std::vector<double>(static_cast<std::size_t>(n), sigma1),
            std::vector<double>(static_cast<std::size_t>(n), sigma2)};
}

Matrix SectorBounds::Sigma1() const {
    return Eigen::Map<const Vector>(sigma1_.data(), dimension()).asDiagonal();
}

Matrix SectorBounds::Sigma2() const {
    return Eigen::Map<const Vector>(sigma2_.data(), dimension()).asDiagonal();
}

bool SectorBounds::is_scalar() const {
    auto all_equal = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    };
    return all_equal(sigma1_) && all_equal(sigma2_);
}

const char* to_string(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::Identity: return "identity";
        case ChannelKind::Saturation: return "saturation";
        case ChannelKind::StaticGain: return "static_gain";
        case ChannelKind::Table: return "table";
    }
    return "unknown";
}

SectorChannel SectorChannel::identity() { return {}; }

SectorChannel SectorChannel::saturation(double limit) {
    if (!(limit > 0.0)) throw Error(ErrorCode::InvalidSector, "saturation limit must be positive");
    SectorChannel c;
    c.kind_ = ChannelKind::Saturation;
    c.param_ = limit;
    return c;
}

SectorChannel SectorChannel::static_gain(double gain) {
    SectorChannel c;
    c.kind_ = ChannelKind::StaticGain;
    c.param_ = gain;
    return c;
}

SectorChannel SectorChannel::table(std::vector<std::pair<double, double>> knots) {
    std::sort(knots.begin(), knots.end());
    auto zero = std::find_if(knots.begin(), knots.end(), [](const auto& p) { return p.first == 0.0; });
    if (zero == knots.end()) {
        knots.emplace_back(0.0, 0.0);
        std::sort(knots.begin(), knots.end());
    } else if (zero->second != 0.0) {
        throw Error(ErrorCode::InvalidSector, "table channel must map 0 to 0");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (knots[i].first == knots[i - 1].first) {
            throw Error(ErrorCode::InvalidSector, "table channel has repeated abscissa");
        }
    }
    if (knots.size() < 2) throw Error(ErrorCode::InvalidSector, "table channel needs two knots");
    SectorChannel c;
    c.kind_ = ChannelKind::Table;
    c.knots_ = std::move(knots);
    return c;
}

double SectorChannel::operator()(double z) const {
    switch (kind_) {
        case ChannelKind::Identity: return z;
        case ChannelKind::Saturation: return std::clamp(z, -param_, param_);
        case ChannelKind::StaticGain: return param_ * z;
        case ChannelKind::Table: {
            auto it = std::upper_bound(knots_.begin(), knots_.end(), z,
                                       [](double v, const auto& p) { return v < p.first; });
            std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
            hi = std::clamp<std::size_t>(hi, 1, knots_.size() - 1);
            const auto& [x0, y0] = knots_[hi - 1];
            const auto& [x1, y1] = knots_[hi];
            return y0 + (y1 - y0) * (z - x0) / (x1 - x0);
        }
    }
    return z;
}

ChannelBank ChannelBank::uniform(int edges, int components, const SectorChannel& channel) {
    ChannelBank bank;
    bank.components = components;
    bank.channels.assign(static_cast<std::size_t>(edges * components), channel);
    return bank;
}

ChannelBank ChannelBank::component_gains(int edges, const std::vector<double>& gains) {
    ChannelBank bank;
    bank.components = static_cast<int>(gains.size());
    for (int j = 0; j < edges; ++j) {
        for (double g : gains) bank.channels.push_back(SectorChannel::static_gain(g));
    }
    return bank;
}

ChannelBank ChannelBank::random_gains(int edges, int components, double lo, double hi,
                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ChannelBank bank;
    bank.components = components;
    for (int c = 0; c < edges * components; ++c) {
        // 53-bit uniform in [0, 1), independent of the standard library's distributions.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        bank.channels.push_back(SectorChannel::static_gain(lo + (hi - lo) * u));
    }
    return bank;
}

Vector apply(const ChannelBank& bank, const Vector& z) {
    if (z.size() != bank.size()) {
        throw Error(ErrorCode::ChannelCountMismatch,
                    "channel bank has " + std::to_string(bank.size()) + " channels, signal has " +
                        std::to_string(z.size()));
    }
    Vector y(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) y(i) = bank.channels[static_cast<std::size_t>(i)](z(i));
    return y;
}

SectorCheck sector_certificate(const SectorChannel& channel, double sigma1, double sigma2,
                               double range, int points) {
    points = std::max(points, 1000);
    SectorCheck out;
    out.worst_product = -std::numeric_limits<double>::infinity();
    auto probe = [&](double z) {
        const double y = channel(z);
        const double product = (y - sigma1 * z) * (y - sigma2 * z);
        if (product > out.worst_product) {
            out.worst_product = product;
            out.worst_z = z;
        }
    };
    probe(0.0);
    for (int i = 0; i < points; ++i) {
        probe(-range + 2.0 * range * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    out.pass = out.worst_product <= 1e-12;
    return out;
}

}  // namespace relcon
