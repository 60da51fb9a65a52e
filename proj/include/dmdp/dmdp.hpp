// Copyright 2026 The dmdp Authors
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

#ifndef DMDP_DMDP_HPP_
#define DMDP_DMDP_HPP_

#include "dmdp/bellman.hpp"
#include "dmdp/composition.hpp"
#include "dmdp/core.hpp"
#include "dmdp/error.hpp"
#include "dmdp/gds.hpp"
#include "dmdp/io.hpp"
#include "dmdp/oracle.hpp"
#include "dmdp/report.hpp"

#endif  // DMDP_DMDP_HPP_
