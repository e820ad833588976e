#pragma once

#include <stdexcept>
#include <string>

namespace cascadebai {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define CASCADEBAI_ERROR(Name)                                                 \
  class Name : public Error {                                                  \
  public:                                                                      \
    using Error::Error;                                                        \
  }

CASCADEBAI_ERROR(EmptyWeights);
CASCADEBAI_ERROR(WeightOutOfRange);
CASCADEBAI_ERROR(DegenerateBoundary);
CASCADEBAI_ERROR(BadDelta);
CASCADEBAI_ERROR(BadInstance);
CASCADEBAI_ERROR(NonPositiveGap);
CASCADEBAI_ERROR(ArmTooLong);
CASCADEBAI_ERROR(ZeroMinWeight);
CASCADEBAI_ERROR(DegenerateQ);
CASCADEBAI_ERROR(EpsilonNotZero);
CASCADEBAI_ERROR(BadDistribution);
CASCADEBAI_ERROR(InvalidState);
CASCADEBAI_ERROR(DegeneratePoints);
CASCADEBAI_ERROR(BadGrid);

#undef CASCADEBAI_ERROR

} // namespace cascadebai
