#include "rsma/channel.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace rsma {

ChannelSet gen_channel(const SystemConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(2.0);

  ChannelSet ch;
  ch.channels.resize(cfg.num_tx_antennas, cfg.num_users);
  for (int k = 0; k < cfg.num_users; ++k) {
    for (int i = 0; i < cfg.num_tx_antennas; ++i) {
      const double re = normal(rng) * scale;
      const double im = normal(rng) * scale;
      ch.channels(i, k) = Complex(re, im);
    }
  }
  return ch;
}

void save_channels(const ChannelSet& ch, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << std::setprecision(17);
  out << ch.num_users() << ' ' << ch.num_tx_antennas() << '\n';
  for (int k = 0; k < ch.num_users(); ++k) {
    for (int i = 0; i < ch.num_tx_antennas(); ++i) {
      if (i > 0) out << ' ';
      out << ch.channels(i, k).real() << ' ' << ch.channels(i, k).imag();
    }
    out << '\n';
  }
}

ChannelSet load_channels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  int users = 0, antennas = 0;
  if (!(in >> users >> antennas) || users < 1 || antennas < 1)
    throw std::runtime_error("malformed channel file header in " + path);
  ChannelSet ch;
  ch.channels.resize(antennas, users);
  for (int k = 0; k < users; ++k) {
    for (int i = 0; i < antennas; ++i) {
      double re = 0.0, im = 0.0;
      if (!(in >> re >> im))
        throw std::runtime_error("truncated channel file " + path);
      ch.channels(i, k) = Complex(re, im);
    }
  }
  return ch;
}

}  // namespace rsma
