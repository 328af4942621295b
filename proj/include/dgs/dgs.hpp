#pragma once

#include "dgs/annotation.hpp"
#include "dgs/io/checkpoint.hpp"
#include "dgs/io/dataset.hpp"
#include "dgs/synthetic.hpp"
#include "dgs/trainer.hpp"
