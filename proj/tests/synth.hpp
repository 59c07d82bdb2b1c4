// Deterministic data generators for tests. Normals come from a hand-rolled
// Box-Muller over mt19937_64 so sequences are identical on every platform.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "enstat/dataset.hpp"

namespace synth {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();                     // [0, 1)
    double uniform(double lo, double hi);
    double normal(double mean, double sd);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Dataset with hourly timestamps and the given named columns.
enstat::Dataset make_dataset(const std::vector<std::string>& names,
                             const std::vector<std::vector<double>>& columns);

/// Dataset over the default energy schema, values filled per column.
enstat::Dataset make_default_schema_dataset(const std::vector<std::vector<double>>& columns);

struct WeatherData {
    std::vector<double> temperature;
    std::vector<double> humidity;
    std::vector<double> irradiance;
    std::vector<double> dust;
    std::vector<double> wind;
};

/// Independent Gaussian weather draws with desert-climate marginals
/// (temperature 29.72/8.59, humidity 45.35/18.50, irradiance 464.17/376.76,
/// dust 0.561/0.250, wind 7.34/6.95).
WeatherData make_weather(std::size_t n, Rng& rng);

/// Full-schema dataset with PV from the shipped solar model plus noise and
/// load from the shipped load model plus noise.
enstat::Dataset make_energy_dataset(std::size_t n, double pv_noise_sd, double load_noise_sd,
                                    Rng& rng);

/// Like make_energy_dataset but with cross-correlated weather: temperature
/// rises with irradiance while humidity, wind and dust fall with it. Gives
/// the marginal correlation signs seen in desert PV data (PV-temperature
/// positive despite the negative partial coefficient, PV-dust negative).
enstat::Dataset make_correlated_energy_dataset(std::size_t n, double pv_noise_sd,
                                               double load_noise_sd, Rng& rng);

}  // namespace synth
