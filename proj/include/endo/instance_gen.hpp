#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "endo/ndfpp.hpp"
#include "endo/solver.hpp"

namespace endo {

// City-level source record (one CSV row).
struct CityRecord {
    std::string name, state;
    double lat = 0.0, lon = 0.0;
    long long population = 0;
    double home_value = 0.0;
};

// The three regional hazards plus the no-disruption outcome carrying the
// remaining probability mass.
std::vector<NdfppEvent> default_events();

// Southeastern-US two-letter state codes used to filter the city dataset.
std::vector<std::string> default_state_whitelist();

struct GenConfig {
    long long population_threshold = 650000;
    int facility_count = 4;
    int W = 2;
    int P = 4;
    int L = 3;
    std::uint64_t seed = 0;
    double budget_fraction = 0.5;
    double penalty_multiplier = 10.0;  // dummy-arc cost factor
    double edge_cost_per_km = 10.0;    // edge construction cost per km
    double eta = 0.7;                  // no-disruption mixing weight
    double cross_impact = 0.3;
    double malfunction = 0.05;  // residual failure probability at full protection
    std::vector<std::string> states = default_state_whitelist();
    std::vector<NdfppEvent> events = default_events();
    std::vector<int> facility_nodes;        // non-empty bypasses select_facilities
    std::vector<double> utility_w_profile;  // optional level-likelihood shaping
};

// Parse the CSV at `path` (header columns, any order: city, state_id, lat,
// lng, population, home_value) and keep rows whose state is in `states`
// (empty keeps all). Malformed rows are reported with their line number.
std::vector<CityRecord> load_cities(const std::string& path,
                                    const std::vector<std::string>& states = {});

// Great-circle distance, Earth radius 6371.0 km.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

struct Network {
    std::vector<CityRecord> nodes;          // population >= threshold, input order
    std::vector<std::array<int, 2>> edges;  // Delaunay edges, i < j, sorted
};
// Nodes: cities at or above the population threshold; edges: Delaunay
// triangulation on the raw (lon, lat) plane. Throws on fewer than three
// usable points or a degenerate (collinear) configuration.
Network build_network(const std::vector<CityRecord>& cities, long long population_threshold);

// Disruption intensity at a site: 1 within r1 of the event center, 2 within
// r2, else 3; the no-disruption event maps to 0.
int assign_intensity(const CityRecord& site, const NdfppEvent& event);

// Open `count` facilities, each with capacity sum(b)/(0.9*count): compact
// capacitated location model minimizing home-value opening cost plus
// demand-weighted assignment distance. Deterministic; returns sorted node
// indices.
std::vector<int> select_facilities(const Network& net, int count, const SolveOptions& sopt = {});

// Populate every instance table from the network and config: demands, costs,
// budget, capacity steps, intensities, and the per-variant probability /
// moment tables. Reproducible from (network, cfg, variant).
NdfppInstance gen_parameters(const Network& net, const GenConfig& cfg, Variant variant);

}  // namespace endo
