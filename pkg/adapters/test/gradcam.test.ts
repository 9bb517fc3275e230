import * as tf from '@tensorflow/tfjs'
import { describe, expect, it } from 'vitest'

import { camToUint16, gradCam } from '../src/gradcam'
import { TARGET_LAYER, makeClassifier, pseudoBytes } from './helpers'

function randomInput(size: number, seed: number): tf.Tensor4D {
  return tf.tensor4d(
    Array.from(pseudoBytes(size * size * 3, seed), v => v / 255),
    [1, size, size, 3],
  )
}

describe('gradCam', () => {
  it('produces a map at the target layer resolution', () => {
    const model = makeClassifier(16)
    const cam = gradCam(model, randomInput(16, 1), TARGET_LAYER)
    // target conv sits after one 2x2 pooling step
    expect(cam.shape).toEqual([8, 8])
  })

  it('is non-negative (relu of weighted activations)', () => {
    const model = makeClassifier(16)
    const cam = gradCam(model, randomInput(16, 2), TARGET_LAYER)
    expect(Math.min(...cam.dataSync())).toBeGreaterThanOrEqual(0)
  })

  it('is deterministic for fixed weights and input', () => {
    const model = makeClassifier(16)
    const a = gradCam(model, randomInput(16, 3), TARGET_LAYER).dataSync()
    const b = gradCam(model, randomInput(16, 3), TARGET_LAYER).dataSync()
    expect(Array.from(a)).toEqual(Array.from(b))
  })

  it('rejects an unknown layer name', () => {
    const model = makeClassifier(16)
    expect(() => gradCam(model, randomInput(16, 4), 'nope')).toThrow(/no layer named/)
  })

  it('accepts an explicit class index', () => {
    const model = makeClassifier(16)
    const input = randomInput(16, 5)
    const cam0 = gradCam(model, input, TARGET_LAYER, 0)
    const cam1 = gradCam(model, input, TARGET_LAYER, 1)
    expect(cam0.shape).toEqual(cam1.shape)
  })
})

describe('camToUint16', () => {
  it('min-max normalizes a non-constant map to the full 16-bit range', () => {
    const cam = tf.tensor2d([[0.2, 0.7], [0.4, 1.3]])
    const raster = camToUint16(cam, 2, 2)
    expect(Math.min(...raster)).toBe(0)
    expect(Math.max(...raster)).toBe(65535)
  })

  it('maps a constant map to all zeros', () => {
    const cam = tf.tensor2d([[0.5, 0.5], [0.5, 0.5]])
    expect(Array.from(camToUint16(cam, 2, 2))).toEqual([0, 0, 0, 0])
  })

  it('upsamples to the requested image size', () => {
    const cam = tf.tensor2d([[0, 1], [1, 0]])
    expect(camToUint16(cam, 10, 6).length).toBe(60)
  })
})
