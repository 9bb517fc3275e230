/** Shared test fixtures: tiny deterministic tfjs models and synthetic
 * images/annotations on disk. */

import * as tf from '@tensorflow/tfjs'
import { mkdirSync } from 'fs'
import { join } from 'path'

import { AnnotationEntry, atomicWriteSync, writeRgb8 } from '../src/io'

export const TARGET_LAYER = 'cam_conv'

export function makeClassifier(inputSize = 16, seed = 11): tf.LayersModel {
  const model = tf.sequential()
  model.add(
    tf.layers.conv2d({
      inputShape: [inputSize, inputSize, 3],
      filters: 4,
      kernelSize: 3,
      activation: 'relu',
      padding: 'same',
      kernelInitializer: tf.initializers.glorotUniform({ seed }),
    }),
  )
  model.add(tf.layers.maxPooling2d({ poolSize: 2 }))
  model.add(
    tf.layers.conv2d({
      name: TARGET_LAYER,
      filters: 6,
      kernelSize: 3,
      activation: 'relu',
      padding: 'same',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
    }),
  )
  model.add(tf.layers.globalAveragePooling2d({}))
  model.add(
    tf.layers.dense({
      units: 2,
      activation: 'softmax',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 2 }),
    }),
  )
  return model
}

export function makeSegmenter(inputSize = 16, seed = 23): tf.LayersModel {
  const model = tf.sequential()
  model.add(
    tf.layers.conv2d({
      inputShape: [inputSize, inputSize, 3],
      filters: 8,
      kernelSize: 3,
      activation: 'relu',
      padding: 'same',
      kernelInitializer: tf.initializers.glorotUniform({ seed }),
    }),
  )
  model.add(
    tf.layers.conv2d({
      filters: 1,
      kernelSize: 1,
      activation: 'sigmoid',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
    }),
  )
  return model
}

/** Deterministic pseudo-random bytes (splitmix-style), so fixtures are
 * stable without seeding a global RNG. */
export function pseudoBytes(n: number, seed: number): Uint8Array {
  const out = new Uint8Array(n)
  let state = seed >>> 0
  for (let i = 0; i < n; i++) {
    state = (state * 1664525 + 1013904223) >>> 0
    out[i] = (state >>> 16) & 0xff
  }
  return out
}

export interface FixtureDataset {
  imageDir: string
  annotationsPath: string
  entries: AnnotationEntry[]
}

/** Write n RGB images of the given size plus an annotation file where
 * each image has one or two infected boxes and one uninfected cell. */
export function writeDataset(root: string, n: number, size = 24): FixtureDataset {
  const imageDir = join(root, 'images')
  mkdirSync(imageDir, { recursive: true })
  const entries: AnnotationEntry[] = []
  for (let i = 0; i < n; i++) {
    const imageId = `img${String(i).padStart(3, '0')}`
    writeRgb8(
      join(imageDir, `${imageId}.png`),
      pseudoBytes(size * size * 3, 1000 + i),
      size,
      size,
    )
    const objects = [
      {
        category: 'ring',
        bounding_box: { min_r: 2 + i, min_c: 3, max_r: 2 + i + 6, max_c: 3 + 7 },
      },
      {
        category: 'rbc',
        bounding_box: { min_r: 0, min_c: 0, max_r: 1, max_c: 1 },
      },
    ]
    if (i % 2 === 0) {
      objects.push({
        category: 'trophozoite',
        bounding_box: { min_r: 12, min_c: 10 + i, max_r: 12 + 5, max_c: 10 + i + 4 },
      })
    }
    entries.push({ image: imageId, width: size, height: size, objects })
  }
  const annotationsPath = join(root, 'annotations.json')
  atomicWriteSync(annotationsPath, Buffer.from(JSON.stringify(entries)))
  return { imageDir, annotationsPath, entries }
}
