#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace freqlab {

// Flat vector of all trainable parameters (dimension P).
using ParamVector = std::vector<double>;

enum class Errc {
  DimensionMismatch,
  NonFiniteLoss,
  EmptyDataset,
  ZeroTargetFrequency,
  DegenerateDenominator,
  SwarmTooLarge,
  CountTooLarge,
  BadMagic,
  TruncatedFile,
  CountMismatch,
  IoError,
  ConfigError,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

const char* errc_name(Errc code);

}  // namespace freqlab
