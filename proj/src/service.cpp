#include "freshness/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "freshness/errors.hpp"

namespace freshness {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

ServiceTimeDist ServiceTimeDist::from_atoms(std::vector<Atom> atoms) {
    if (atoms.empty()) {
        throw ValidationError("service-time distribution has an empty support");
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.y < r.y; });
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const Atom& atom = atoms[i];
        if (atom.y < 1) {
            throw ValidationError(fmt::format("service time {} is not a positive integer", atom.y));
        }
        if (i > 0 && atom.y == atoms[i - 1].y) {
            throw ValidationError(fmt::format("service time {} appears twice", atom.y));
        }
        if (!(atom.prob > 0.0 && atom.prob <= 1.0)) {
            throw ValidationError(fmt::format("probability {} of service time {} is not in (0, 1]", atom.prob, atom.y));
        }
        total += atom.prob;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ValidationError(fmt::format("service-time probabilities sum to {:.17g}, not 1", total));
    }
    for (Atom& atom : atoms) {
        atom.prob /= total;
    }
    return ServiceTimeDist(std::move(atoms));
}

ServiceTimeDist::ServiceTimeDist(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    double acc = 0.0;
    cdf_.reserve(atoms_.size());
    for (const Atom& atom : atoms_) {
        acc += atom.prob;
        cdf_.push_back(acc);
        mean_ += atom.prob * static_cast<double>(atom.y);
    }
    cdf_.back() = 1.0;
}

std::vector<ServiceTimeDist::Atom> ServiceTimeDist::parse_atoms(std::string_view text) {
    std::vector<Atom> atoms;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = text.find_first_of(", \t", pos);
        const std::string_view token = trim(text.substr(pos, end == std::string_view::npos ? end : end - pos));
        pos = end == std::string_view::npos ? text.size() : end + 1;
        if (token.empty()) {
            continue;
        }
        const std::size_t colon = token.find(':');
        if (colon == std::string_view::npos) {
            throw ValidationError(fmt::format("service atom '{}' is not of the form y:prob", token));
        }
        const std::string_view ys = trim(token.substr(0, colon));
        const std::string ps(trim(token.substr(colon + 1)));
        Atom atom;
        const auto [yp, yec] = std::from_chars(ys.data(), ys.data() + ys.size(), atom.y);
        if (yec != std::errc() || yp != ys.data() + ys.size()) {
            throw ValidationError(fmt::format("service time '{}' is not an integer", ys));
        }
        std::size_t used = 0;
        try {
            atom.prob = std::stod(ps, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != ps.size()) {
            throw ValidationError(fmt::format("probability '{}' is not a number", ps));
        }
        atoms.push_back(atom);
    }
    return atoms;
}

bool ServiceTimeDist::contains(Steps y) const {
    return std::any_of(atoms_.begin(), atoms_.end(), [y](const Atom& a) { return a.y == y; });
}

Steps ServiceTimeDist::sample(Rng& rng) const {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = std::min(static_cast<std::size_t>(it - cdf_.begin()), atoms_.size() - 1);
    return atoms_[idx].y;
}

std::string ServiceTimeDist::to_string() const {
    std::string out;
    for (const Atom& atom : atoms_) {
        if (!out.empty()) {
            out += ", ";
        }
        out += fmt::format("{}:{:.17g}", atom.y, atom.prob);
    }
    return out;
}

} // namespace freshness
