#pragma once

#include "sdqz/archive.hpp"
#include "sdqz/bitstream.hpp"
#include "sdqz/core.hpp"
#include "sdqz/dualquant.hpp"
#include "sdqz/error.hpp"
#include "sdqz/huffman.hpp"
#include "sdqz/metrics.hpp"
#include "sdqz/parallel.hpp"
#include "sdqz/pipeline.hpp"
#include "sdqz/rawio.hpp"
#include "sdqz/synth.hpp"
