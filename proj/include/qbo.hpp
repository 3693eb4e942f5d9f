// Copyright 2026 The qbo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include "qbo/acquisition.hpp"
#include "qbo/bitvector.hpp"
#include "qbo/config.hpp"
#include "qbo/dataset.hpp"
#include "qbo/driver.hpp"
#include "qbo/encoding.hpp"
#include "qbo/error.hpp"
#include "qbo/objective.hpp"
#include "qbo/pipeline.hpp"
#include "qbo/report.hpp"
#include "qbo/seeding.hpp"
#include "qbo/solver.hpp"
#include "qbo/surrogate.hpp"
#include "qbo/validate.hpp"
