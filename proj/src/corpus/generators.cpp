#include "stf/corpus/generators.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "stf/ml/rng.hpp"

namespace stf {

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    if (s == "-0.00" || s == "-0.0000") s.erase(0, 1);
    return s;
}

void require_size(const char* name, std::size_t n, std::size_t min) {
    if (n < min) {
        throw GeneratorError(std::string(name) + " needs at least " + std::to_string(min) + " rows, got " +
                             std::to_string(n));
    }
}

double seasonal(std::size_t t) { return 50.0 + 10.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 24.0); }

}  // namespace

bool attacker_rule(int ip_block, int hour) { return ip_block >= 200 && ip_block <= 255 && hour >= 0 && hour <= 5; }

std::vector<PingRow> pingpong_rows(std::uint64_t seed, std::size_t n, double flip) {
    SplitMix64 rng(seed);
    std::vector<PingRow> rows(n);
    for (auto& r : rows) {
        r.ip_block = static_cast<int>(rng.below(256));
        r.hour = static_cast<int>(rng.below(24));
        r.attacker = attacker_rule(r.ip_block, r.hour);
        if (rng.uniform() < flip) r.attacker = !r.attacker;
    }
    return rows;
}

std::string pingpong_csv(const std::vector<PingRow>& rows) {
    std::string out = "ip_block,hour,attacker\n";
    for (const auto& r : rows) {
        out += std::to_string(r.ip_block) + "," + std::to_string(r.hour) + "," + (r.attacker ? "true" : "false") + "\n";
    }
    return out;
}

std::string gen_pingpong(std::uint64_t seed, std::size_t n, double flip) {
    require_size("pingpong", n, 20);
    return pingpong_csv(pingpong_rows(seed, n, flip));
}

std::vector<NialmRow> nialm_rows(std::uint64_t seed, std::size_t T, double sigma) {
    SplitMix64 rng(seed);
    std::vector<NialmRow> rows(T);
    for (std::size_t t = 0; t < T; ++t) {
        NialmRow& r = rows[t];
        r.t = static_cast<std::int64_t>(t);
        r.app1_on = t % 40 < 20;
        r.app2_on = t % 70 < 21;
        r.aggregate = 100.0 + (r.app1_on ? 1000.0 : 0.0) + (r.app2_on ? 400.0 : 0.0) + sigma * rng.normal();
    }
    return rows;
}

std::string nialm_csv(const std::vector<NialmRow>& rows) {
    std::string out = "t,aggregate,app1_on,app2_on\n";
    for (const auto& r : rows) {
        out += std::to_string(r.t) + "," + fixed(r.aggregate, 2) + "," + (r.app1_on ? "true" : "false") + "," +
               (r.app2_on ? "true" : "false") + "\n";
    }
    return out;
}

std::string gen_nialm(std::uint64_t seed, std::size_t T, double sigma) {
    require_size("nialm", T, 200);
    return nialm_csv(nialm_rows(seed, T, sigma));
}

std::vector<double> price_series(std::uint64_t seed, std::size_t T, const PriceParams& params) {
    SplitMix64 rng(seed);
    std::vector<double> p(T);
    if (T == 0) return p;
    p[0] = 50.0;
    for (std::size_t t = 1; t < T; ++t) {
        p[t] = seasonal(t) + params.ar * (p[t - 1] - seasonal(t - 1)) + params.sigma * rng.normal();
    }
    return p;
}

std::string prices_csv(const std::vector<double>& prices, std::size_t first_t) {
    std::string out = "t,price\n";
    for (std::size_t i = 0; i < prices.size(); ++i) out += std::to_string(first_t + i) + "," + fixed(prices[i], 4) + "\n";
    return out;
}

std::string gen_prices(std::uint64_t seed, std::size_t T, const PriceParams& params) {
    require_size("prices", T, 200);
    return prices_csv(price_series(seed, T, params));
}

const std::vector<std::string>& generator_names() {
    static const std::vector<std::string> names = {"pingpong", "nialm", "prices"};
    return names;
}

std::string synthesize(const GeneratorSpec& spec) {
    if (spec.scenario == "pingpong") return gen_pingpong(spec.seed, spec.n, spec.noise.value_or(kPingLabelNoise));
    if (spec.scenario == "nialm") return gen_nialm(spec.seed, spec.n, spec.noise.value_or(kNialmSigma));
    if (spec.scenario == "prices") {
        PriceParams p;
        if (spec.noise) p.sigma = *spec.noise;
        return gen_prices(spec.seed, spec.n, p);
    }
    throw GeneratorError("unknown scenario '" + spec.scenario + "' (expected pingpong, nialm or prices)");
}

CorpusSplit synthesize_split(const GeneratorSpec& spec, double holdout) {
    if (!(holdout >= 0.0 && holdout < 1.0)) throw GeneratorError("holdout must be in [0, 1)");
    synthesize(spec);
    const std::size_t test = static_cast<std::size_t>(std::llround(static_cast<double>(spec.n) * holdout));
    CorpusSplit out;
    out.train_rows = spec.n - test;
    const auto train_end = static_cast<std::ptrdiff_t>(out.train_rows);
    if (spec.scenario == "pingpong") {
        const auto rows = pingpong_rows(spec.seed, spec.n, spec.noise.value_or(kPingLabelNoise));
        out.csv = pingpong_csv({rows.begin(), rows.begin() + train_end});
        out.scenario = pingpong_scenario({rows.begin() + train_end, rows.end()}, kScenarioFirstTick, kScenarioSpacing + 1);
    } else if (spec.scenario == "nialm") {
        const auto rows = nialm_rows(spec.seed, spec.n, spec.noise.value_or(kNialmSigma));
        out.csv = nialm_csv({rows.begin(), rows.begin() + train_end});
        out.scenario = nialm_scenario({rows.begin() + train_end, rows.end()}, kScenarioFirstTick, kScenarioSpacing);
    } else {
        PriceParams p;
        if (spec.noise) p.sigma = *spec.noise;
        const auto prices = price_series(spec.seed, spec.n, p);
        out.csv = prices_csv({prices.begin(), prices.begin() + train_end});
        out.scenario = prices_scenario({prices.begin() + train_end, prices.end()}, out.train_rows, kScenarioFirstTick,
                                       kScenarioSpacing);
    }
    return out;
}

std::string pingpong_scenario(const std::vector<PingRow>& rows, std::int64_t first_tick, std::int64_t spacing) {
    std::string out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out += std::to_string(first_tick + static_cast<std::int64_t>(i) * spacing) + " client console probe " +
               std::to_string(rows[i].ip_block) + "," + std::to_string(rows[i].hour) + "\n";
    }
    return out;
}

std::string nialm_scenario(const std::vector<NialmRow>& rows, std::int64_t first_tick, std::int64_t spacing) {
    std::string out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out += std::to_string(first_tick + static_cast<std::int64_t>(i) * spacing) + " home meter sample " +
               std::to_string(rows[i].t) + "," + fixed(rows[i].aggregate, 2) + "\n";
    }
    return out;
}

std::string prices_scenario(const std::vector<double>& prices, std::size_t first_t, std::int64_t first_tick,
                            std::int64_t spacing) {
    std::string out;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        out += std::to_string(first_tick + static_cast<std::int64_t>(i) * spacing) + " feed exchange quote " +
               std::to_string(first_t + i) + "," + fixed(prices[i], 4) + "\n";
    }
    return out;
}

}  // namespace stf
