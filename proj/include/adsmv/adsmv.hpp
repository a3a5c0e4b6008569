#pragma once

#include "adsmv/ad_exec.hpp"
#include "adsmv/ad_model.hpp"
#include "adsmv/ad_text.hpp"
#include "adsmv/ad_validate.hpp"
#include "adsmv/conformance.hpp"
#include "adsmv/diagnostic.hpp"
#include "adsmv/fsm_exec.hpp"
#include "adsmv/smv_ir.hpp"
#include "adsmv/smv_text.hpp"
#include "adsmv/trace.hpp"
#include "adsmv/translate.hpp"
