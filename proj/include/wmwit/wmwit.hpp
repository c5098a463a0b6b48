// Copyright 2026 The wmwit Authors
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

#pragma once

#include "wmwit/entanglement.hpp"
#include "wmwit/error.hpp"
#include "wmwit/hilbert.hpp"
#include "wmwit/io.hpp"
#include "wmwit/nonlocality.hpp"
#include "wmwit/observables.hpp"
#include "wmwit/partitions.hpp"
#include "wmwit/photostat.hpp"
#include "wmwit/report.hpp"
#include "wmwit/roots.hpp"
#include "wmwit/states.hpp"
#include "wmwit/tables.hpp"
