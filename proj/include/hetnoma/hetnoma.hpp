// Copyright 2026 The hetnoma Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "hetnoma/channel.hpp"
#include "hetnoma/clustering.hpp"
#include "hetnoma/config.hpp"
#include "hetnoma/error.hpp"
#include "hetnoma/master.hpp"
#include "hetnoma/oracle.hpp"
#include "hetnoma/orchestrator.hpp"
#include "hetnoma/report_io.hpp"
#include "hetnoma/slave.hpp"
#include "hetnoma/sweep.hpp"
#include "hetnoma/types.hpp"
#include "hetnoma/verify.hpp"
