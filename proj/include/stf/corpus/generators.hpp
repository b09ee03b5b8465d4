#pragma once

// Seeded synthetic datasets for the three corpus scenarios. Every random
// decision draws from SplitMix64 in a fixed order, so a (seed, size, noise)
// triple always yields the same bytes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stf/model/error.hpp"

namespace stf {

class GeneratorError : public Error {
public:
    using Error::Error;
};

/// Network security pings. Per row: ip_block = below(256), hour = below(24),
/// then one uniform draw that flips the label when below `flip`.
/// attacker = ip_block in [200,255] and hour in [0,5].
struct PingRow {
    int ip_block = 0;
    int hour = 0;
    bool attacker = false;
};
inline constexpr double kPingLabelNoise = 0.02;
std::vector<PingRow> pingpong_rows(std::uint64_t seed, std::size_t n, double flip = kPingLabelNoise);
std::string pingpong_csv(const std::vector<PingRow>& rows);
/// CSV `ip_block,hour,attacker`; n >= 20.
std::string gen_pingpong(std::uint64_t seed, std::size_t n, double flip = kPingLabelNoise);
bool attacker_rule(int ip_block, int hour);

/// Household power. app1: 1000 W, on for ticks with t mod 40 < 20.
/// app2: 400 W, on for t mod 70 < 21. aggregate = 100 W + loads + N(0, sigma).
struct NialmRow {
    std::int64_t t = 0;
    double aggregate = 0.0;
    bool app1_on = false;
    bool app2_on = false;
};
inline constexpr double kNialmSigma = 20.0;
std::vector<NialmRow> nialm_rows(std::uint64_t seed, std::size_t T, double sigma = kNialmSigma);
/// CSV `t,aggregate,app1_on,app2_on`, aggregate with two decimals; T >= 200.
std::string gen_nialm(std::uint64_t seed, std::size_t T, double sigma = kNialmSigma);
std::string nialm_csv(const std::vector<NialmRow>& rows);

/// Hourly prices: p_0 = 50, p_t = s(t) + ar (p_{t-1} - s(t-1)) + N(0, sigma)
/// with s(t) = 50 + 10 sin(2 pi t / 24).
struct PriceParams {
    double sigma = 1.0;
    double ar = 0.8;
};
std::vector<double> price_series(std::uint64_t seed, std::size_t T, const PriceParams& params = {});
/// CSV `t,price`, price with four decimals; T >= 200.
std::string gen_prices(std::uint64_t seed, std::size_t T, const PriceParams& params = {});
std::string prices_csv(const std::vector<double>& prices, std::size_t first_t = 0);

struct GeneratorSpec {
    std::string scenario;  ///< pingpong, nialm or prices
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::optional<double> noise;  ///< flip rate, sigma in W, or sigma of the price shock
};

const std::vector<std::string>& generator_names();
/// Dispatches to the named generator. Throws GeneratorError on unknown
/// names and sizes below the scenario minimum.
std::string synthesize(const GeneratorSpec& spec);

/// Training CSV of the first rows plus a scenario feeding the held-out tail
/// (`holdout` fraction, rounded) into the matching corpus model.
struct CorpusSplit {
    std::string csv;
    std::string scenario;
    std::size_t train_rows = 0;
};
inline constexpr std::int64_t kScenarioFirstTick = 2;
inline constexpr std::int64_t kScenarioSpacing = 2;
CorpusSplit synthesize_split(const GeneratorSpec& spec, double holdout);

/// Corpus scenario scripts feeding held-out rows into the corpus models.
std::string pingpong_scenario(const std::vector<PingRow>& rows, std::int64_t first_tick, std::int64_t spacing);
std::string nialm_scenario(const std::vector<NialmRow>& rows, std::int64_t first_tick, std::int64_t spacing);
std::string prices_scenario(const std::vector<double>& prices, std::size_t first_t, std::int64_t first_tick,
                            std::int64_t spacing);

}  // namespace stf
