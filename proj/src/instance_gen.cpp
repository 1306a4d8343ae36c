#include "endo/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "delaunator.hpp"
#include "endo/rng.hpp"

namespace endo {

std::vector<NdfppEvent> default_events() {
    return {
        {"hurricane", 27.9506, -82.4572, 250.0, 800.0, 0.10, false},  // Tampa, FL
        {"snowstorm", 35.7796, -78.6382, 160.0, 800.0, 0.05, false},  // Raleigh, NC
        {"tornado", 34.7304, -86.5861, 80.0, 400.0, 0.10, false},     // Huntsville, AL
        {"none", 0.0, 0.0, 0.0, 0.0, 0.75, true},
    };
}

std::vector<std::string> default_state_whitelist() {
    return {"AL", "AR", "FL", "GA", "KY", "LA", "MS", "NC", "SC", "TN", "VA", "WV"};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

[[noreturn]] void row_error(const std::string& path, int line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

double parse_real(const std::string& path, int line, const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) row_error(path, line, std::string("bad ") + what + ": " + s);
        return v;
    } catch (const std::logic_error&) {
        row_error(path, line, std::string("bad ") + what + ": " + s);
    }
}

}  // namespace

std::vector<CityRecord> load_cities(const std::string& path,
                                    const std::vector<std::string>& states) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open city dataset: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    const auto header = split_csv_line(line);
    auto column = [&](const char* name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::runtime_error(path + ": missing column: " + std::string(name));
        return (int)(it - header.begin());
    };
    const int c_city = column("city"), c_state = column("state_id"), c_lat = column("lat"),
              c_lng = column("lng"), c_pop = column("population"),
              c_home = column("home_value");

    std::vector<CityRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        const int needed = std::max({c_city, c_state, c_lat, c_lng, c_pop, c_home});
        if ((int)f.size() <= needed) row_error(path, lineno, "too few fields");
        CityRecord r;
        r.name = f[c_city];
        r.state = f[c_state];
        r.lat = parse_real(path, lineno, f[c_lat], "lat");
        r.lon = parse_real(path, lineno, f[c_lng], "lng");
        const double pop = parse_real(path, lineno, f[c_pop], "population");
        if (pop <= 0 || pop != std::floor(pop))
            row_error(path, lineno, "bad population: " + f[c_pop]);
        r.population = (long long)pop;
        r.home_value = parse_real(path, lineno, f[c_home], "home_value");
        if (std::abs(r.lat) > 90.0) row_error(path, lineno, "latitude outside [-90,90]");
        if (std::abs(r.lon) > 180.0) row_error(path, lineno, "longitude outside [-180,180]");
        if (!states.empty() &&
            std::find(states.begin(), states.end(), r.state) == states.end())
            continue;
        out.push_back(std::move(r));
    }
    return out;
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    constexpr double kEarthRadiusKm = 6371.0;
    constexpr double kDeg = 3.14159265358979323846 / 180.0;
    const double dlat = (lat2 - lat1) * kDeg, dlon = (lon2 - lon1) * kDeg;
    const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(lat1 * kDeg) * std::cos(lat2 * kDeg) * std::sin(dlon / 2) *
                         std::sin(dlon / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

Network build_network(const std::vector<CityRecord>& cities, long long population_threshold) {
    Network net;
    for (const auto& c : cities)
        if (c.population >= population_threshold) net.nodes.push_back(c);
    if (net.nodes.size() < 3)
        throw std::invalid_argument("build_network: need at least 3 cities above threshold");
    std::vector<double> coords;
    coords.reserve(net.nodes.size() * 2);
    for (const auto& c : net.nodes) {
        coords.push_back(c.lon);
        coords.push_back(c.lat);
    }
    std::set<std::array<int, 2>> edges;
    try {
        const delaunator::Delaunator d(coords);
        for (size_t t = 0; t + 2 < d.triangles.size(); t += 3) {
            const int a = (int)d.triangles[t], b = (int)d.triangles[t + 1],
                      c = (int)d.triangles[t + 2];
            edges.insert({std::min(a, b), std::max(a, b)});
            edges.insert({std::min(b, c), std::max(b, c)});
            edges.insert({std::min(a, c), std::max(a, c)});
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("build_network: degenerate (collinear) city coordinates");
    }
    if (edges.empty())
        throw std::invalid_argument("build_network: degenerate (collinear) city coordinates");
    net.edges.assign(edges.begin(), edges.end());
    return net;
}

int assign_intensity(const CityRecord& site, const NdfppEvent& event) {
    if (event.no_disruption) return 0;
    const double d = haversine_km(site.lat, site.lon, event.center_lat, event.center_lon);
    if (d <= event.r1_km) return 1;
    if (d <= event.r2_km) return 2;
    return 3;
}

std::vector<int> select_facilities(const Network& net, int count, const SolveOptions& sopt) {
    const int n = (int)net.nodes.size();
    if (count <= 0 || count > n)
        throw std::invalid_argument("select_facilities: count must be in [1, nodes]");
    std::vector<double> b(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        b[i] = net.nodes[i].population / 1e4;
        total += b[i];
    }
    const double cap = total / (0.9 * count);

    MipModel m;
    std::vector<int> open(n);
    std::vector<std::vector<int>> assign(n, std::vector<int>(n));
    for (int f = 0; f < n; ++f) open[f] = m.add_binary("open_" + std::to_string(f));
    for (int i = 0; i < n; ++i)
        for (int f = 0; f < n; ++f)
            assign[i][f] =
                m.add_continuous("a_" + std::to_string(i) + "_" + std::to_string(f), 0.0, 1.0);

    LinExpr obj, total_open;
    for (int f = 0; f < n; ++f) {
        obj.add(open[f], net.nodes[f].home_value);
        total_open.add(open[f]);
    }
    m.add_row("open_count", std::move(total_open), RowSense::EQ, (double)count);
    for (int i = 0; i < n; ++i) {
        LinExpr one;
        for (int f = 0; f < n; ++f) {
            const double d =
                haversine_km(net.nodes[i].lat, net.nodes[i].lon, net.nodes[f].lat,
                             net.nodes[f].lon);
            obj.add(assign[i][f], b[i] * d);
            one.add(assign[i][f]);
            LinExpr link = LinExpr::of_var(assign[i][f]) - LinExpr::of_var(open[f]);
            m.add_row("link_" + std::to_string(i) + "_" + std::to_string(f), std::move(link),
                      RowSense::LE, 0.0);
        }
        m.add_row("serve_" + std::to_string(i), std::move(one), RowSense::EQ, 1.0);
    }
    for (int f = 0; f < n; ++f) {
        LinExpr load;
        for (int i = 0; i < n; ++i) load.add(assign[i][f], b[i]);
        load.add(open[f], -cap);
        m.add_row("cap_" + std::to_string(f), std::move(load), RowSense::LE, 0.0);
    }
    m.set_objective(std::move(obj), ObjSense::Minimize);
    const SolveResult res = solve(m, sopt);
    if (res.status != SolveStatus::Optimal)
        throw std::runtime_error(std::string("select_facilities: solve failed: ") +
                                 to_string(res.status));
    std::vector<int> chosen;
    for (int f = 0; f < n; ++f)
        if (value_of(res.solution, open[f]) > 0.5) chosen.push_back(f);
    return chosen;  // ascending by construction
}

NdfppInstance gen_parameters(const Network& net, const GenConfig& cfg, Variant variant) {
    const int n = (int)net.nodes.size();
    NdfppInstance inst;
    inst.seed = cfg.seed;
    inst.variant = variant;
    inst.P = cfg.P;
    inst.W = cfg.W;
    inst.L = cfg.L;
    inst.penalty_multiplier = cfg.penalty_multiplier;
    inst.cross_impact = cfg.cross_impact;
    inst.events = cfg.events;
    inst.utility_w_profile = cfg.utility_w_profile;

    for (const auto& c : net.nodes) {
        inst.node_names.push_back(c.name + ", " + c.state);
        inst.node_lat.push_back(c.lat);
        inst.node_lon.push_back(c.lon);
        inst.demand.push_back(c.population / 1e4);
    }
    inst.edges = net.edges;
    for (const auto& e : inst.edges) {
        const double len = haversine_km(net.nodes[e[0]].lat, net.nodes[e[0]].lon,
                                        net.nodes[e[1]].lat, net.nodes[e[1]].lon);
        inst.edge_length_km.push_back(len);
        inst.edge_cost.push_back(len * cfg.edge_cost_per_km);
    }

    if (!cfg.facility_nodes.empty()) {
        inst.facilities = cfg.facility_nodes;
        std::sort(inst.facilities.begin(), inst.facilities.end());
        for (int f : inst.facilities)
            if (f < 0 || f >= n)
                throw std::invalid_argument("gen_parameters: facility outside node set");
        if (std::adjacent_find(inst.facilities.begin(), inst.facilities.end()) !=
            inst.facilities.end())
            throw std::invalid_argument("gen_parameters: duplicate facility node");
    } else {
        inst.facilities = select_facilities(net, cfg.facility_count);
    }
    const int F = (int)inst.facilities.size();
    for (int f : inst.facilities) inst.demand[f] = 0.0;

    const double B = inst.total_demand();
    const double nu_max = B / (0.9 * F);
    if (cfg.W < 1) throw std::invalid_argument("gen_parameters: W must be >= 1");
    inst.nu_bar = nu_max / cfg.W;
    inst.rho = 1.0 + cfg.cross_impact * (F - 1);

    // Protection costs: per-facility max level cost uniform on [7500, 15000],
    // linear in the level index.
    const RngStream cost_stream = RngStream(cfg.seed).sub(0);
    inst.protection_cost.resize(F);
    double budget = 0.0;
    for (int f = 0; f < F; ++f) {
        const double cmax = 7500.0 + 7500.0 * cost_stream.u01_open(f);
        for (int p = 1; p <= cfg.P; ++p) inst.protection_cost[f].push_back(cmax * p / cfg.P);
        budget += cmax;
    }
    for (double c : inst.edge_cost) budget += c;
    inst.budget = cfg.budget_fraction * budget;

    const int nd = (int)cfg.events.size();
    inst.intensity.assign(nd, std::vector<int>(F, 0));
    for (int d = 0; d < nd; ++d)
        for (int f = 0; f < F; ++f)
            inst.intensity[d][f] = assign_intensity(net.nodes[inst.facilities[f]],
                                                    cfg.events[d]);

    const double s = 1.0 - cfg.malfunction;
    inst.phi_bar.assign(nd, std::vector<std::vector<double>>(F, std::vector<double>(cfg.P)));
    inst.mu_bar.assign(nd, std::vector<std::vector<double>>(F, std::vector<double>(cfg.P)));
    inst.sigma_bar.assign(nd, std::vector<double>(F));
    for (int d = 0; d < nd; ++d)
        for (int f = 0; f < F; ++f) {
            const int lhat = inst.intensity[d][f];  // 0 for the no-disruption event
            for (int p = 1; p <= cfg.P; ++p) {
                const double ratio = s * p / cfg.P;  // s * c_f^p / c_f^P
                inst.phi_bar[d][f][p - 1] =
                    cfg.events[d].no_disruption
                        ? cfg.eta * ratio + (1.0 - cfg.eta)
                        : std::pow(ratio, (double)lhat / cfg.L);
                inst.mu_bar[d][f][p - 1] =
                    nu_max * (1.0 - (cfg.P + 1.0 - p) * (cfg.L + lhat + 2.0) /
                                        (2.0 * (cfg.P + 1.0) * (cfg.L + 1.0)));
            }
            inst.sigma_bar[d][f] =
                nu_max * (cfg.L + lhat + 2.0) / (8.0 * (cfg.P + 1.0) * (cfg.L + 1.0));
        }

    // Generation invariants: probabilities proper, the decision-dependent
    // success probability can never exceed 1, and the Normal moment tables
    // keep capacities nonnegative within the truncation window.
    for (int d = 0; d < nd; ++d)
        for (int f = 0; f < F; ++f) {
            for (int p = 0; p < cfg.P; ++p) {
                const double v = inst.phi_bar[d][f][p];
                if (!(v >= 0.0 && v <= 1.0))
                    throw std::runtime_error("gen_parameters: success probability outside [0,1]");
            }
            double worst = 0.0;
            for (int i = 0; i < F; ++i) {
                double best = 0.0;
                for (int p = 0; p < cfg.P; ++p)
                    best = std::max(best, inst.phi_tilde(d, f, i, p));
                worst += best;
            }
            if (worst > inst.rho + 1e-9)
                throw std::runtime_error("gen_parameters: mixed success probability above 1");
            if (!(0.0 <= 4.0 * inst.sigma_bar[d][f] &&
                  4.0 * inst.sigma_bar[d][f] <= inst.mu_bar[d][f][0] + 1e-9))
                throw std::runtime_error("gen_parameters: moment ordering violated");
            for (int p = 1; p < cfg.P; ++p)
                if (inst.mu_bar[d][f][p] + 1e-12 < inst.mu_bar[d][f][p - 1])
                    throw std::runtime_error("gen_parameters: means not monotone in level");
        }

    inst.name = to_string(variant) + "_n" + std::to_string(n) + "_f" + std::to_string(F) +
                "_W" + std::to_string(cfg.W) + "_seed" + std::to_string(cfg.seed);
    inst.validate();
    return inst;
}

}  // namespace endo
