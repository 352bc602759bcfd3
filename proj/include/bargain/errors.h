// Copyright 2026 The Bargain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BARGAIN_ERRORS_H_
#define BARGAIN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace bargain {

// Base of every error raised by the library. Subclasses name the failure
// category; callers that only care about "something went wrong" catch Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BARGAIN_DEFINE_ERROR(Name)              \
  class Name : public Error {                   \
   public:                                      \
    using Error::Error;                         \
  }

BARGAIN_DEFINE_ERROR(ContractError);
BARGAIN_DEFINE_ERROR(IllegalTransitionError);
BARGAIN_DEFINE_ERROR(InvalidActError);
BARGAIN_DEFINE_ERROR(InvalidDivisionError);
BARGAIN_DEFINE_ERROR(SamplingError);
BARGAIN_DEFINE_ERROR(LookupError);
BARGAIN_DEFINE_ERROR(DomainError);
BARGAIN_DEFINE_ERROR(IoError);
BARGAIN_DEFINE_ERROR(TrainingError);
BARGAIN_DEFINE_ERROR(ConfigError);
BARGAIN_DEFINE_ERROR(DataError);
BARGAIN_DEFINE_ERROR(IntegrityError);
BARGAIN_DEFINE_ERROR(IncompleteGridError);
BARGAIN_DEFINE_ERROR(NotFoundError);
BARGAIN_DEFINE_ERROR(StateError);
BARGAIN_DEFINE_ERROR(TurnOrderError);
BARGAIN_DEFINE_ERROR(ConflictError);
BARGAIN_DEFINE_ERROR(ValidationError);
BARGAIN_DEFINE_ERROR(PreconditionError);

#undef BARGAIN_DEFINE_ERROR

}  // namespace bargain

#endif  // BARGAIN_ERRORS_H_
