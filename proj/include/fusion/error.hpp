#pragma once

#include <stdexcept>
#include <string>

namespace fusion {

enum class Errc {
  NotPSD,
  DimensionMismatch,
  NonFinite,
  EmptyInput,
  AllZeroWeights,
  SeriesNonConvergence,
  ChainDiverged,
  AcceptanceStarvation,
  BadZeta,
  BadBeta,
  CountMismatch,
  TooFewSamples,
  UnboundedRegion,
  ConfigInvalid,
  BadArgument,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace fusion
